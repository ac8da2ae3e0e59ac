#include "opmean/divergence.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace opmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpdMatrix whitened_ratio(const SpdMatrix& a, const SpdMatrix& b) {
    if (a.dim() != b.dim()) throw DomainError("divergence: operand dimensions differ");
    return congruence(spd_inverse(spd_sqrt(a)).entries(), b);
}

// Adaptive Simpson with the Richardson acceptance test |S2 - S1| <= 15 tol.
double adaptive_simpson(const std::function<double(double)>& h, double lo, double hi, double f_lo,
                        double f_mid, double f_hi, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double f_lmid = h(lmid);
    const double f_rmid = h(rmid);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
    const double split = left + right;
    if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol) {
        return split + (split - whole) / 15.0;
    }
    return adaptive_simpson(h, lo, mid, f_lo, f_lmid, f_mid, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(h, mid, hi, f_mid, f_rmid, f_hi, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& h, double lo, double hi, double tol) {
    if (lo == hi) return 0.0;
    const double mid = 0.5 * (lo + hi);
    const double f_lo = h(lo);
    const double f_mid = h(mid);
    const double f_hi = h(hi);
    const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    return adaptive_simpson(h, lo, hi, f_lo, f_mid, f_hi, whole, tol, 48);
}

} // namespace

double d_rtm(const SpdMatrix& a, const SpdMatrix& b) {
    return spd_log(whitened_ratio(a, b)).frobenius_norm();
}

GeodesicPoint rtm_geodesic(const SpdMatrix& a, const SpdMatrix& b, double t) {
    if (!std::isfinite(t)) throw DomainError("rtm_geodesic: t must be finite");
    SpdMatrix root = spd_sqrt(a);
    SpdMatrix ratio = congruence(spd_inverse(root).entries(), b);
    return GeodesicPoint{t, congruence(root.entries(), spd_power(ratio, t))};
}

HermitianMatrix rtm_velocity(const SpdMatrix& a, const SpdMatrix& b, double t) {
    if (!std::isfinite(t)) throw DomainError("rtm_velocity: t must be finite");
    SpdMatrix root = spd_sqrt(a);
    SpdMatrix ratio = congruence(spd_inverse(root).entries(), b);
    HermitianMatrix core = matrix_function(
        ratio, [t](double x) { return std::pow(x, t) * std::log(x); }, "velocity");
    return congruence(root.entries(), core);
}

double d_bw(const SpdMatrix& a, const SpdMatrix& b) {
    if (a.dim() != b.dim()) throw DomainError("d_bw: operand dimensions differ");
    SpdMatrix inner = congruence(spd_sqrt(a).entries(), b);
    double cross = 0.0;
    for (Eigen::Index i = 0; i < inner.dim(); ++i) {
        cross += std::sqrt(inner.spectrum().eigenvalues(i));
    }
    const double scale = a.trace() + b.trace();
    double radicand = scale - 2.0 * cross;
    if (radicand < 0.0) {
        if (radicand < -1e-10 * scale) {
            std::ostringstream os;
            os << "d_bw: squared distance " << radicand << " is negative beyond roundoff";
            throw NumericalError(os.str());
        }
        radicand = 0.0;
    }
    return std::sqrt(radicand);
}

SpdMatrix bw_curve_verbatim(const SpdMatrix& a, const SpdMatrix& b, double t) {
    if (!std::isfinite(t)) throw DomainError("bw_curve_verbatim: t must be finite");
    if (a.dim() != b.dim()) throw DomainError("bw_curve_verbatim: operand dimensions differ");
    SpdMatrix root = spd_sqrt(a);
    SpdMatrix inner_root = spd_sqrt(congruence(root.entries(), b));
    // (AB)^{1/2} = A^{1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}; its adjoint is
    // the principal square root of BA.
    ComplexMatrix cross =
        root.entries() * inner_root.entries() * spd_inverse(root).entries();
    ComplexMatrix curve = (1.0 - t) * (1.0 - t) * a.entries() * a.entries() +
                          t * t * b.entries() * b.entries() +
                          t * (1.0 - t) * (cross + cross.adjoint());
    return SpdMatrix(std::move(curve));
}

double phi_mu(const GeneratorMeasure& mu, const SpdMatrix& a, const SpdMatrix& b) {
    const double c = mu.center_of_mass();
    SpdMatrix mixed = mean(MeanDescriptor::from_measure(mu), a, b);
    return (1.0 - c) * a.trace() + c * b.trace() - mixed.trace();
}

SigmaPotential::SigmaPotential(MeanDescriptor descriptor) : descriptor_(std::move(descriptor)) {
    if (std::abs(descriptor_.f_at_1() - 1.0) > 1e-9) {
        throw DomainError("SigmaPotential: sigma must be a mean (f(1) = 1)");
    }
    if (!descriptor_.is_symmetric()) {
        throw DomainError("SigmaPotential: sigma must be symmetric");
    }
}

bool SigmaPotential::contains(double x) const {
    if (!std::isfinite(x)) return false;
    const double lo = domain_lo();
    const double hi = domain_hi();
    if (lo > 0.0 ? x <= lo * (1.0 + 1e-12) : x <= 0.0) return false;
    if (std::isfinite(hi) && x >= hi * (1.0 - 1e-12)) return false;
    return true;
}

double SigmaPotential::g(double x) const {
    if (!contains(x)) {
        std::ostringstream os;
        os << "SigmaPotential::g: " << x << " is outside the domain (" << domain_lo() << ", "
           << domain_hi() << ")";
        throw DomainError(os.str());
    }
    if (x == 1.0) return 0.0;
    // f^{-1} dominates the cost; the adaptive splitter revisits panel endpoints,
    // so cache inverse values per evaluation point.
    auto cache = std::make_shared<std::unordered_map<double, double>>();
    const MeanDescriptor& d = descriptor_;
    auto integrand = [cache, &d](double t) {
        auto it = cache->find(t);
        double inv;
        if (it != cache->end()) {
            inv = it->second;
        } else {
            inv = d.f_inverse(t);
            cache->emplace(t, inv);
        }
        return 1.0 - 1.0 / inv;
    };
    const double sign = x >= 1.0 ? 1.0 : -1.0;
    const double lo = std::min(1.0, x);
    const double hi = std::max(1.0, x);
    return sign * integrate(integrand, lo, hi, 1e-11);
}

double SigmaPotential::g_prime(double x) const {
    if (!contains(x)) {
        std::ostringstream os;
        os << "SigmaPotential::g_prime: " << x << " is outside the domain (" << domain_lo() << ", "
           << domain_hi() << ")";
        throw DomainError(os.str());
    }
    return 1.0 - 1.0 / descriptor_.f_inverse(x);
}

double phi_sigma(const SigmaPotential& potential, const SpdMatrix& a, const SpdMatrix& b) {
    SpdMatrix ratio = whitened_ratio(a, b);
    const RealVector& eigenvalues = ratio.spectrum().eigenvalues;
    double total = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (!potential.contains(eigenvalues(i))) return kInf;
        total += potential.g(eigenvalues(i));
    }
    return total;
}

} // namespace opmean
