#pragma once

#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

namespace opmean {

/// Point gamma(t) on a unit-parametrized curve between two SPD matrices.
struct GeodesicPoint {
    double t;
    SpdMatrix value;
};

/// Riemannian trace metric distance ||log(A^{-1/2} B A^{-1/2})||_F.
double d_rtm(const SpdMatrix& a, const SpdMatrix& b);

/// Geodesic A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}; t = 1/2 is the geometric mean.
GeodesicPoint rtm_geodesic(const SpdMatrix& a, const SpdMatrix& b, double t);

/// Velocity A^{1/2} M^t log(M) A^{1/2} with M = A^{-1/2} B A^{-1/2}.
HermitianMatrix rtm_velocity(const SpdMatrix& a, const SpdMatrix& b, double t);

/// Bures-Wasserstein distance sqrt(tr A + tr B - 2 tr (A^{1/2} B A^{1/2})^{1/2}).
/// Radicands in [-1e-10 * scale, 0) are clamped to 0; anything lower throws.
double d_bw(const SpdMatrix& a, const SpdMatrix& b);

/// The two-point curve formula
///   (1-t)^2 A^2 + t^2 B^2 + t(1-t) ((AB)^{1/2} + (BA)^{1/2}),
/// with (AB)^{1/2} = A^{1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}, implemented
/// exactly as written. Note the endpoints are A^2 and B^2; the curve whose
/// points minimize (1-t) d_bw^2(A,.) + t d_bw^2(B,.) is obtained from
/// bw_barycenter with weights (1-t, t) instead.
SpdMatrix bw_curve_verbatim(const SpdMatrix& a, const SpdMatrix& b, double t);

/// Generalized quantum Hellinger divergence
///   phi_mu(A,B) = tr((1-c) A + c B - A sigma_mu B),  c = c(mu).
/// Nonnegative; zero iff A = B when mu is not supported on {0,1}.
double phi_mu(const GeneratorMeasure& mu, const SpdMatrix& a, const SpdMatrix& b);

/// Convex potential of a symmetric mean:
///   g(x) = integral_1^x (1 - 1/f^{-1}(t)) dt on ran(f),
/// with g(1) = g'(1) = 0. Evaluated by adaptive Simpson quadrature with
/// memoized f^{-1} calls.
class SigmaPotential {
  public:
    explicit SigmaPotential(MeanDescriptor descriptor);

    const MeanDescriptor& descriptor() const { return descriptor_; }
    double domain_lo() const { return descriptor_.range_lo(); }
    double domain_hi() const { return descriptor_.range_hi(); }

    /// Open-interval membership with relative margin 1e-12 (boundary
    /// eigenvalues are roundoff-fragile).
    bool contains(double x) const;

    double g(double x) const;        // throws DomainError off the domain
    double g_prime(double x) const;  // 1 - 1/f^{-1}(x)

  private:
    MeanDescriptor descriptor_;
};

/// Divergence tr g(A^{-1/2} B A^{-1/2}) when the spectrum lies in ran(f);
/// +infinity otherwise (a value, never an exception).
double phi_sigma(const SigmaPotential& potential, const SpdMatrix& a, const SpdMatrix& b);

} // namespace opmean
