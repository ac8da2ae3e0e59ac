#include "opmean/mean.hpp"

#include <cmath>
#include <sstream>

namespace opmean {

namespace {

std::string tag(const char* family, double parameter) {
    std::ostringstream os;
    os << family << ":" << parameter;
    return os.str();
}

void require_open_unit(double value, const char* family) {
    if (!(value > 0.0 && value < 1.0)) {
        std::ostringstream os;
        os << family << ": parameter " << value
           << " must lie in the open interval (0, 1); the endpoints degenerate to projections";
        throw DomainError(os.str());
    }
}

std::vector<double> symmetry_grid() {
    std::vector<double> grid;
    const int count = 25;
    const double lo = std::log(0.1);
    const double hi = std::log(10.0);
    for (int i = 0; i < count; ++i) {
        grid.push_back(std::exp(lo + (hi - lo) * double(i) / double(count - 1)));
    }
    return grid;
}

} // namespace

double invert_increasing(const std::function<double(double)>& h,
                         const std::function<double(double)>& h_prime, double target) {
    double lo = 1.0;
    double hi = 1.0;
    int guard = 0;
    while (h(lo) > target) {
        lo *= 0.5;
        if (++guard > 1200 || lo == 0.0) {
            throw DomainError("invert_increasing: target below the range of h");
        }
    }
    guard = 0;
    while (h(hi) < target) {
        hi *= 2.0;
        if (++guard > 1200 || std::isinf(hi)) {
            throw DomainError("invert_increasing: target above the range of h");
        }
    }

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = h(x) - target;
        if (fx == 0.0) return x;
        if (fx > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        if (hi - lo <= 1e-12 * hi) break;
        const double slope = h_prime(x);
        double next = (slope > 0.0) ? x - fx / slope : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
        x = next;
    }
    return 0.5 * (lo + hi);
}

MeanDescriptor MeanDescriptor::from_measure(GeneratorMeasure measure, std::string name) {
    MeanDescriptor d;
    d.name_ = std::move(name);
    d.f_at_1_ = measure.total_mass();
    d.measure_ = std::move(measure);
    return d;
}

MeanDescriptor MeanDescriptor::from_generator(GeneratorTriple generator, std::string name,
                                              bool normalized) {
    if (!generator.f || !generator.f_prime) {
        throw DomainError("from_generator: f and f_prime are required");
    }
    MeanDescriptor d;
    d.name_ = std::move(name);
    d.f_at_1_ = generator.f(1.0);
    if (normalized && std::abs(d.f_at_1_ - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "from_generator: f(1) = " << d.f_at_1_ << " but a mean requires f(1) = 1";
        throw DomainError(os.str());
    }
    d.generator_ = std::make_shared<const GeneratorTriple>(std::move(generator));
    return d;
}

MeanDescriptor MeanDescriptor::arithmetic(double lambda) {
    require_open_unit(lambda, "arithmetic");
    return from_measure(GeneratorMeasure::endpoint_atoms(lambda), tag("arithmetic", lambda));
}

MeanDescriptor MeanDescriptor::harmonic(double lambda) {
    require_open_unit(lambda, "harmonic");
    return from_measure(GeneratorMeasure::dirac(lambda), tag("harmonic", lambda));
}

MeanDescriptor MeanDescriptor::geometric(double p) {
    require_open_unit(p, "geometric");
    GeneratorTriple t;
    t.f = [p](double x) { return std::pow(x, p); };
    t.f_prime = [p](double x) { return p * std::pow(x, p - 1.0); };
    t.f_inverse = [p](double y) { return std::pow(y, 1.0 / p); };
    return from_generator(std::move(t), tag("geometric", p));
}

MeanDescriptor MeanDescriptor::parallel_sum_connection() {
    GeneratorTriple t;
    t.f = [](double x) { return x / (x + 1.0); };
    t.f_prime = [](double x) { return 1.0 / ((x + 1.0) * (x + 1.0)); };
    t.f_inverse = [](double y) { return y / (1.0 - y); };
    t.range_hi = 1.0;
    return from_generator(std::move(t), "parallel-sum", /*normalized=*/false);
}

MeanDescriptor MeanDescriptor::ah_geometric(double alpha) {
    require_open_unit(alpha, "ah-geo");
    // f = sqrt(a_alpha(x) * h_alpha(x)) with numerator N = (1-a) x + a x^2 and
    // denominator D = (1-a) x + a; the geometric bridge between the weighted
    // arithmetic and harmonic means.
    auto ratio = [alpha](double x) {
        const double n = (1.0 - alpha) * x + alpha * x * x;
        const double d = (1.0 - alpha) * x + alpha;
        return n / d;
    };
    auto ratio_prime = [alpha](double x) {
        const double n = (1.0 - alpha) * x + alpha * x * x;
        const double np = (1.0 - alpha) + 2.0 * alpha * x;
        const double d = (1.0 - alpha) * x + alpha;
        const double dp = 1.0 - alpha;
        return (np * d - n * dp) / (d * d);
    };
    GeneratorTriple t;
    t.f = [ratio](double x) { return std::sqrt(ratio(x)); };
    t.f_prime = [ratio, ratio_prime](double x) {
        return 0.5 * ratio_prime(x) / std::sqrt(ratio(x));
    };
    return from_generator(std::move(t), tag("ah-geo", alpha));
}

MeanDescriptor MeanDescriptor::heinz(double nu) {
    require_open_unit(nu, "heinz");
    GeneratorTriple t;
    t.f = [nu](double x) { return 0.5 * (std::pow(x, nu) + std::pow(x, 1.0 - nu)); };
    t.f_prime = [nu](double x) {
        return 0.5 * (nu * std::pow(x, nu - 1.0) + (1.0 - nu) * std::pow(x, -nu));
    };
    return from_generator(std::move(t), tag("heinz", nu));
}

MeanDescriptor MeanDescriptor::log_mean() {
    GeneratorTriple t;
    // (x-1)/log x with the removable singularity at 1 handled by a short
    // Taylor expansion in u = x-1 (relative error below 1e-16 for |u| < 1e-4).
    t.f = [](double x) {
        const double u = x - 1.0;
        if (std::abs(u) < 1e-4) return 1.0 + u * (0.5 + u * (-1.0 / 12.0 + u / 24.0));
        return u / std::log(x);
    };
    t.f_prime = [](double x) {
        const double u = x - 1.0;
        if (std::abs(u) < 1e-4) return 0.5 + u * (-1.0 / 6.0 + u * 0.125);
        const double lg = std::log(x);
        return (lg - 1.0 + 1.0 / x) / (lg * lg);
    };
    return from_generator(std::move(t), "logmean");
}

const GeneratorMeasure& MeanDescriptor::measure() const {
    if (!measure_) throw DomainError("MeanDescriptor: no measure representation available");
    return *measure_;
}

double MeanDescriptor::f(double x) const {
    if (measure_) return measure_->eval_f(x);
    if (!(x > 0.0)) throw DomainError("MeanDescriptor::f: argument must be positive");
    return generator_->f(x);
}

double MeanDescriptor::f_prime(double x) const {
    if (measure_) return measure_->eval_f_prime(x);
    if (!(x > 0.0)) throw DomainError("MeanDescriptor::f_prime: argument must be positive");
    return generator_->f_prime(x);
}

double MeanDescriptor::f_inverse(double t) const {
    if (!(t > range_lo() && t < range_hi())) {
        std::ostringstream os;
        os << "f_inverse: " << t << " is outside the range (" << range_lo() << ", " << range_hi()
           << ") of " << name_;
        throw DomainError(os.str());
    }
    if (generator_ && generator_->f_inverse) return generator_->f_inverse(t);
    return invert_increasing([this](double x) { return f(x); },
                             [this](double x) { return f_prime(x); }, t);
}

double MeanDescriptor::f_at_1() const { return f_at_1_; }

double MeanDescriptor::weight() const {
    if (measure_) return measure_->center_of_mass();
    return generator_->f_prime(1.0);
}

double MeanDescriptor::range_lo() const {
    if (measure_) return measure_->inf_f();
    return generator_->range_lo;
}

double MeanDescriptor::range_hi() const {
    if (measure_) return measure_->sup_f();
    return generator_->range_hi;
}

bool MeanDescriptor::has_full_range() const {
    return range_lo() == 0.0 && std::isinf(range_hi());
}

bool MeanDescriptor::is_symmetric(double tol) const {
    for (double x : symmetry_grid()) {
        const double direct = f(x);
        const double swapped = x * f(1.0 / x);
        if (std::abs(direct - swapped) > tol * (1.0 + std::abs(direct))) return false;
    }
    return true;
}

MeanDescriptor MeanDescriptor::adjoint() const {
    auto self = std::make_shared<const MeanDescriptor>(*this);
    GeneratorTriple t;
    t.f = [self](double x) { return 1.0 / self->f(1.0 / x); };
    t.f_prime = [self](double x) {
        const double fv = self->f(1.0 / x);
        return self->f_prime(1.0 / x) / (x * x * fv * fv);
    };
    t.f_inverse = [self](double y) { return 1.0 / self->f_inverse(1.0 / y); };
    t.range_lo = std::isinf(range_hi()) ? 0.0 : 1.0 / range_hi();
    t.range_hi = range_lo() == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / range_lo();
    return from_generator(std::move(t), name_ + "-adjoint", /*normalized=*/false);
}

MeanDescriptor MeanDescriptor::transpose() const {
    if (measure_) {
        return from_measure(measure_->flipped(), name_ + "-transpose");
    }
    auto self = std::make_shared<const MeanDescriptor>(*this);
    GeneratorTriple t;
    t.f = [self](double x) { return x * self->f(1.0 / x); };
    t.f_prime = [self](double x) { return self->f(1.0 / x) - self->f_prime(1.0 / x) / x; };
    // Range: a symmetric generator keeps its range under transposition, and the
    // asymmetric generator families here (geometric, ah-geo) are all surjective
    // onto (0, inf), as are their transposes.
    if (is_symmetric()) {
        t.range_lo = range_lo();
        t.range_hi = range_hi();
    }
    return from_generator(std::move(t), name_ + "-transpose", /*normalized=*/false);
}

SpdMatrix mean(const MeanDescriptor& sigma, const SpdMatrix& a, const SpdMatrix& b) {
    if (a.dim() != b.dim()) throw DomainError("mean: operand dimensions differ");
    SpdMatrix root = spd_sqrt(a);
    SpdMatrix inv_root = spd_inverse(root);
    SpdMatrix ratio = congruence(inv_root.entries(), b);
    HermitianMatrix mapped =
        matrix_function(ratio, [&sigma](double x) { return sigma.f(x); }, sigma.name());
    return congruence(root.entries(), SpdMatrix(std::move(mapped)));
}

SpdMatrix parallel_sum(const SpdMatrix& a, const SpdMatrix& b) {
    if (a.dim() != b.dim()) throw DomainError("parallel_sum: operand dimensions differ");
    return spd_inverse(SpdMatrix(spd_inverse(a).hermitian() + spd_inverse(b).hermitian()));
}

} // namespace opmean
