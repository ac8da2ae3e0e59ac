#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "opmean/hermitian.hpp"
#include "opmean/measure.hpp"

namespace opmean {

/// Directly evaluable generator: f with its derivative and (optionally) a
/// closed-form inverse, plus the declared range of f. A missing inverse is
/// supplied numerically by safeguarded bisection+Newton.
struct GeneratorTriple {
    std::function<double(double)> f;
    std::function<double(double)> f_prime;
    std::function<double(double)> f_inverse;  // may be empty
    double range_lo = 0.0;
    double range_hi = std::numeric_limits<double>::infinity();
};

/// Invert a strictly increasing scalar function: find x with h(x) = target.
/// Bracket expansion [x/2, 2x] with doubling, then bisection-safeguarded
/// Newton; relative tolerance 1e-12.
double invert_increasing(const std::function<double(double)>& h,
                         const std::function<double(double)>& h_prime, double target);

/// A Kubo-Ando connection given either by its representing probability measure
/// on [0,1] or by a generator triple. Means have f(1) = 1; the parallel sum is
/// the standard example of a non-normalized connection (f(1) = 1/2).
class MeanDescriptor {
  public:
    static MeanDescriptor from_measure(GeneratorMeasure measure, std::string name = "measure");
    static MeanDescriptor from_generator(GeneratorTriple generator, std::string name = "generator",
                                         bool normalized = true);

    // Named families. Weight parameters are restricted to the open interval:
    // the endpoint cases degenerate to the left/right projections, whose
    // generators are constant and carry no invertible structure.
    static MeanDescriptor arithmetic(double lambda);     // (1-l) + l x
    static MeanDescriptor geometric(double p);           // x^p
    static MeanDescriptor harmonic(double lambda);       // x / ((1-l) x + l)
    static MeanDescriptor parallel_sum_connection();     // x / (x+1), a connection not a mean
    static MeanDescriptor ah_geometric(double alpha);    // sqrt(x (1-a+a x) / ((1-a) x + a))
    static MeanDescriptor heinz(double nu);              // (x^nu + x^(1-nu)) / 2
    static MeanDescriptor log_mean();                    // (x-1) / log x

    const std::string& name() const { return name_; }
    bool has_measure() const { return measure_.has_value(); }
    const GeneratorMeasure& measure() const;

    double f(double x) const;
    double f_prime(double x) const;
    double f_inverse(double t) const;  // throws DomainError for t outside ran(f)

    double f_at_1() const;             // 1 for means
    double weight() const;             // W(sigma) = f'(1) = c(mu)

    double range_lo() const;
    double range_hi() const;           // +inf when f is unbounded
    bool has_full_range() const;       // ran(f) = (0, inf)

    /// f(x) = x f(1/x) on a sample grid (the transpose-invariance criterion).
    bool is_symmetric(double tol = 1e-9) const;

    /// Adjoint connection, generated by f*(x) = 1/f(1/x).
    MeanDescriptor adjoint() const;
    /// Transpose connection, generated by x f(1/x); swaps the mean's arguments.
    MeanDescriptor transpose() const;

  private:
    MeanDescriptor() = default;

    std::string name_;
    std::optional<GeneratorMeasure> measure_;
    std::shared_ptr<const GeneratorTriple> generator_;  // null for measure form
    double f_at_1_ = 1.0;
};

/// Kubo-Ando connection applied to positive definite operators:
///   A sigma B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.
SpdMatrix mean(const MeanDescriptor& sigma, const SpdMatrix& a, const SpdMatrix& b);

/// Parallel sum (A^{-1} + B^{-1})^{-1}, evaluated directly.
SpdMatrix parallel_sum(const SpdMatrix& a, const SpdMatrix& b);

} // namespace opmean
