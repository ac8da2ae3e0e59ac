#include "opmean/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "opmean/quadrature.hpp"

namespace opmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_unit_atoms(const std::vector<WeightedAtom>& atoms, const char* what) {
    for (const WeightedAtom& a : atoms) {
        if (!(a.location >= 0.0 && a.location <= 1.0)) {
            std::ostringstream os;
            os << what << ": location " << a.location << " is outside [0, 1]";
            throw DomainError(os.str());
        }
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
            std::ostringstream os;
            os << what << ": mass " << a.mass << " is not positive and finite";
            throw DomainError(os.str());
        }
    }
}

double mass_sum(const std::vector<WeightedAtom>& atoms) {
    double total = 0.0;
    for (const WeightedAtom& a : atoms) total += a.mass;
    return total;
}

// Builds the Gauss-Jacobi sampling of the x^p density without the doubling
// self-check (which itself needs this builder at two orders).
GeneratorMeasure make_jacobi(double p, int nodes) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("jacobi_power_family: exponent must lie in (0, 1)");
    }
    // Density sin(p pi)/pi * s^(p-1) (1-s)^(-p): Jacobi weight with
    // alpha = -p, beta = p - 1, premultiplied by the constant sin(p pi)/pi.
    QuadratureRule rule = gauss_jacobi_unit(nodes, -p, p - 1.0);
    const double constant = std::sin(p * std::numbers::pi) / std::numbers::pi;
    std::vector<WeightedAtom> density;
    density.reserve(rule.nodes.size());
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        density.push_back({rule.nodes[k], constant * rule.weights[k]});
    }
    return GeneratorMeasure({}, std::move(density), DensitySpec{"jacobi", p, nodes});
}

std::vector<double> standard_x_grid() {
    std::vector<double> grid;
    const int count = 101;
    const double lo = std::log(0.1);
    const double hi = std::log(10.0);
    grid.reserve(count);
    for (int i = 0; i < count; ++i) {
        grid.push_back(std::exp(lo + (hi - lo) * double(i) / double(count - 1)));
    }
    return grid;
}

} // namespace

GeneratorMeasure::GeneratorMeasure(std::vector<WeightedAtom> atoms,
                                   std::vector<WeightedAtom> density_nodes,
                                   std::optional<DensitySpec> provenance)
    : atoms_(std::move(atoms)), density_nodes_(std::move(density_nodes)),
      provenance_(std::move(provenance)) {
    validate_unit_atoms(atoms_, "GeneratorMeasure atom");
    validate_unit_atoms(density_nodes_, "GeneratorMeasure density node");
    const double total = total_mass();
    if (std::abs(total - 1.0) > kMeasureMassTol) {
        std::ostringstream os;
        os << "GeneratorMeasure: total mass " << total << " is not 1 within " << kMeasureMassTol;
        throw DomainError(os.str());
    }
}

GeneratorMeasure GeneratorMeasure::from_atoms(std::vector<WeightedAtom> atoms) {
    return GeneratorMeasure(std::move(atoms), {});
}

GeneratorMeasure GeneratorMeasure::dirac(double location) {
    return GeneratorMeasure({{location, 1.0}}, {});
}

GeneratorMeasure GeneratorMeasure::endpoint_atoms(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError("endpoint_atoms: lambda must lie in [0, 1]");
    }
    std::vector<WeightedAtom> atoms;
    if (1.0 - lambda > 0.0) atoms.push_back({0.0, 1.0 - lambda});
    if (lambda > 0.0) atoms.push_back({1.0, lambda});
    return from_atoms(std::move(atoms));
}

GeneratorMeasure GeneratorMeasure::jacobi_power_family(double p, int nodes) {
    GeneratorMeasure result = make_jacobi(p, nodes);
    const double drift = jacobi_doubling_error(p, nodes);
    if (drift > 1e-8) {
        std::cerr << "warning: jacobi power family p=" << p << " at " << nodes
                  << " nodes drifts by " << drift << " under node doubling\n";
    }
    return result;
}

GeneratorMeasure GeneratorMeasure::uniform_density(int nodes) {
    QuadratureRule rule = gauss_legendre_unit(nodes);
    std::vector<WeightedAtom> density;
    density.reserve(rule.nodes.size());
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        density.push_back({rule.nodes[k], rule.weights[k]});
    }
    return GeneratorMeasure({}, std::move(density), DensitySpec{"legendre", 0.5, nodes});
}

double GeneratorMeasure::total_mass() const { return mass_sum(atoms_) + mass_sum(density_nodes_); }

double GeneratorMeasure::center_of_mass() const {
    double center = 0.0;
    for (const WeightedAtom& a : atoms_) center += a.mass * a.location;
    for (const WeightedAtom& a : density_nodes_) center += a.mass * a.location;
    return center;
}

double GeneratorMeasure::mass_at(double location) const {
    double total = 0.0;
    for (const WeightedAtom& a : atoms_) {
        if (a.location == location) total += a.mass;
    }
    for (const WeightedAtom& a : density_nodes_) {
        if (a.location == location) total += a.mass;
    }
    return total;
}

double GeneratorMeasure::eval_f(double x) const {
    if (!(x > 0.0)) throw DomainError("eval_f: argument must be positive");
    double value = 0.0;
    auto term = [x](const WeightedAtom& a) {
        return a.mass * x / ((1.0 - a.location) * x + a.location);
    };
    for (const WeightedAtom& a : atoms_) value += term(a);
    for (const WeightedAtom& a : density_nodes_) value += term(a);
    return value;
}

double GeneratorMeasure::eval_f_prime(double x) const {
    if (!(x > 0.0)) throw DomainError("eval_f_prime: argument must be positive");
    double value = 0.0;
    auto term = [x](const WeightedAtom& a) {
        const double denom = (1.0 - a.location) * x + a.location;
        return a.mass * a.location / (denom * denom);
    };
    for (const WeightedAtom& a : atoms_) value += term(a);
    for (const WeightedAtom& a : density_nodes_) value += term(a);
    return value;
}

double GeneratorMeasure::inf_f() const { return mass_at(0.0); }

double GeneratorMeasure::sup_f() const {
    double value = 0.0;
    auto term = [&value](const WeightedAtom& a) {
        if (a.location == 1.0) {
            value = kInf;
        } else if (value != kInf) {
            value += a.mass / (1.0 - a.location);
        }
    };
    for (const WeightedAtom& a : atoms_) term(a);
    for (const WeightedAtom& a : density_nodes_) term(a);
    return value;
}

GeneratorMeasure GeneratorMeasure::flipped() const {
    auto flip = [](std::vector<WeightedAtom> list) {
        for (WeightedAtom& a : list) a.location = 1.0 - a.location;
        return list;
    };
    std::optional<DensitySpec> provenance = provenance_;
    if (provenance && provenance->family == "jacobi") {
        provenance->p = 1.0 - provenance->p;  // x^p flips to x^(1-p)
    }
    return GeneratorMeasure(flip(atoms_), flip(density_nodes_), std::move(provenance));
}

std::vector<double> GeneratorMeasure::support_points() const {
    std::vector<double> points;
    points.reserve(atoms_.size() + density_nodes_.size());
    for (const WeightedAtom& a : atoms_) points.push_back(a.location);
    for (const WeightedAtom& a : density_nodes_) points.push_back(a.location);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

HalfLineMeasure::HalfLineMeasure(std::vector<WeightedAtom> atoms,
                                 std::vector<WeightedAtom> density_nodes, double mass_at_infinity)
    : atoms_(std::move(atoms)), density_nodes_(std::move(density_nodes)),
      mass_at_infinity_(mass_at_infinity) {
    auto check = [](const std::vector<WeightedAtom>& list, const char* what) {
        for (const WeightedAtom& a : list) {
            if (!(a.location >= 0.0)) {
                throw DomainError(std::string(what) + ": location must be >= 0");
            }
            if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
                throw DomainError(std::string(what) + ": mass must be positive and finite");
            }
        }
    };
    check(atoms_, "HalfLineMeasure atom");
    check(density_nodes_, "HalfLineMeasure density node");
    if (!(mass_at_infinity_ >= 0.0) || !std::isfinite(mass_at_infinity_)) {
        throw DomainError("HalfLineMeasure: mass at infinity must be >= 0 and finite");
    }
}

HalfLineMeasure HalfLineMeasure::from_atoms(std::vector<WeightedAtom> atoms,
                                            double mass_at_infinity) {
    return HalfLineMeasure(std::move(atoms), {}, mass_at_infinity);
}

double HalfLineMeasure::total_mass() const {
    return mass_sum(atoms_) + mass_sum(density_nodes_) + mass_at_infinity_;
}

GeneratorMeasure pushforward_to_unit(const HalfLineMeasure& m) {
    auto push = [](const std::vector<WeightedAtom>& list) {
        std::vector<WeightedAtom> out;
        out.reserve(list.size());
        for (const WeightedAtom& a : list) {
            const double mapped = std::isinf(a.location) ? 1.0 : a.location / (a.location + 1.0);
            out.push_back({mapped, a.mass});
        }
        return out;
    };
    std::vector<WeightedAtom> atoms = push(m.atoms());
    if (m.mass_at_infinity() > 0.0) atoms.push_back({1.0, m.mass_at_infinity()});
    return GeneratorMeasure(std::move(atoms), push(m.density_nodes()));
}

double integrated_call(const GeneratorMeasure& mu, double s) {
    double value = 0.0;
    for (const WeightedAtom& a : mu.atoms()) value += a.mass * std::max(a.location - s, 0.0);
    for (const WeightedAtom& a : mu.density_nodes()) {
        value += a.mass * std::max(a.location - s, 0.0);
    }
    return value;
}

bool convex_order_leq(const GeneratorMeasure& mu, const GeneratorMeasure& nu, int grid_size) {
    const double center_tol = 1e-10;
    const double call_slack = 1e-12;
    if (std::abs(mu.center_of_mass() - nu.center_of_mass()) > center_tol) return false;
    std::vector<double> probes = mu.support_points();
    std::vector<double> other = nu.support_points();
    probes.insert(probes.end(), other.begin(), other.end());
    for (int i = 0; i < grid_size; ++i) {
        probes.push_back(double(i) / double(std::max(grid_size - 1, 1)));
    }
    for (double s : probes) {
        if (integrated_call(mu, s) > integrated_call(nu, s) + call_slack) return false;
    }
    return true;
}

double jacobi_doubling_error(double p, int nodes) {
    GeneratorMeasure coarse = make_jacobi(p, nodes);
    GeneratorMeasure fine = make_jacobi(p, 2 * nodes);
    double worst = 0.0;
    for (double x : standard_x_grid()) {
        worst = std::max(worst, std::abs(coarse.eval_f(x) - fine.eval_f(x)));
    }
    return worst;
}

} // namespace opmean
