#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opmean/errors.hpp"

namespace opmean {

inline constexpr double kMeasureMassTol = 1e-10;

struct WeightedAtom {
    double location;
    double mass;
};

/// Provenance of a quadrature-sampled density part, kept so measures built
/// from a named family serialize back to the compact family form.
struct DensitySpec {
    std::string family;  // "jacobi" or "legendre"
    double p = 0.5;      // exponent of the power family; ignored for "legendre"
    int nodes = 64;
};

/// Borel probability measure on [0,1] represented as point atoms plus a
/// quadrature-sampled absolutely continuous part. Integration against the
/// measure is the finite sum over atoms and density nodes.
///
/// Generates the operator monotone function
///   f(x) = sum_i w_i * x / ((1-l_i) x + l_i),
/// which in turn generates a Kubo-Ando connection; f(1) = total mass, so a
/// probability measure generates a mean.
class GeneratorMeasure {
  public:
    /// General constructor. Validates locations in [0,1], positive masses and
    /// total mass 1 within kMeasureMassTol.
    GeneratorMeasure(std::vector<WeightedAtom> atoms, std::vector<WeightedAtom> density_nodes,
                     std::optional<DensitySpec> provenance = std::nullopt);

    static GeneratorMeasure from_atoms(std::vector<WeightedAtom> atoms);
    static GeneratorMeasure dirac(double location);
    /// (1-lambda) delta_0 + lambda delta_1: the weighted arithmetic generator.
    static GeneratorMeasure endpoint_atoms(double lambda);
    /// Gauss-Jacobi discretization of the density sin(p pi)/pi * s^(p-1) (1-s)^(-p),
    /// whose generated f is x^p. Warns on stderr if doubling the node count moves
    /// f by more than 1e-8 on the standard grid.
    static GeneratorMeasure jacobi_power_family(double p, int nodes = 64);
    /// Gauss-Legendre discretization of the Lebesgue measure on [0,1].
    static GeneratorMeasure uniform_density(int nodes = 64);

    const std::vector<WeightedAtom>& atoms() const { return atoms_; }
    const std::vector<WeightedAtom>& density_nodes() const { return density_nodes_; }
    const std::optional<DensitySpec>& density_spec() const { return provenance_; }

    double total_mass() const;
    /// Center of mass c(mu) = integral of lambda; equals f'(1).
    double center_of_mass() const;
    /// Mass of atoms sitting exactly at `location`.
    double mass_at(double location) const;

    double eval_f(double x) const;        // throws DomainError for x <= 0
    double eval_f_prime(double x) const;  // d/dx of eval_f

    /// Limits of f at 0+ and +infinity; (inf_f, sup_f) is the range of f.
    double inf_f() const;  // = mass at 0
    double sup_f() const;  // = integral of 1/(1-lambda); +inf if an atom sits at 1

    /// Pushforward by lambda -> 1 - lambda (the transpose of the generated mean).
    GeneratorMeasure flipped() const;

    /// Atom locations and density nodes, merged and sorted.
    std::vector<double> support_points() const;

  private:
    std::vector<WeightedAtom> atoms_;
    std::vector<WeightedAtom> density_nodes_;
    std::optional<DensitySpec> provenance_;
};

/// Positive measure on the extended half-line [0, inf]; finite total mass,
/// mass at infinity carried separately.
class HalfLineMeasure {
  public:
    HalfLineMeasure(std::vector<WeightedAtom> atoms, std::vector<WeightedAtom> density_nodes,
                    double mass_at_infinity = 0.0);

    static HalfLineMeasure from_atoms(std::vector<WeightedAtom> atoms, double mass_at_infinity = 0.0);

    const std::vector<WeightedAtom>& atoms() const { return atoms_; }
    const std::vector<WeightedAtom>& density_nodes() const { return density_nodes_; }
    double mass_at_infinity() const { return mass_at_infinity_; }
    double total_mass() const;

  private:
    std::vector<WeightedAtom> atoms_;
    std::vector<WeightedAtom> density_nodes_;
    double mass_at_infinity_;
};

/// Pushforward by T: t -> t/(t+1) (infinity -> 1). Atom and node masses
/// transport unchanged, so total mass is preserved exactly; the result must be
/// a probability measure for GeneratorMeasure validation to pass.
GeneratorMeasure pushforward_to_unit(const HalfLineMeasure& m);

/// Integrated call ("hockey stick") potential: integral of (t - s)_+ d mu(t).
double integrated_call(const GeneratorMeasure& mu, double s);

/// Convex-order test mu <= nu: equal centers of mass and pointwise dominance of
/// the integrated-call potentials on the union of both supports and a uniform
/// grid. Exact for finitely supported measures.
bool convex_order_leq(const GeneratorMeasure& mu, const GeneratorMeasure& nu, int grid_size = 101);

/// Discrepancy between the generated f at `nodes` and at 2*`nodes` quadrature
/// points, maximized over the standard acceptance grid [0.1, 10].
double jacobi_doubling_error(double p, int nodes);

} // namespace opmean
