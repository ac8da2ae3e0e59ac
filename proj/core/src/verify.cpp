#include "opmean/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "opmean/barycenter.hpp"
#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

namespace opmean {

namespace {

constexpr int kMaxReportedFailures = 5;

struct Suite {
    explicit Suite(std::string name) : name_(std::move(name)) {}

    void check(bool ok, const std::string& label) {
        ++checks_;
        if (!ok) {
            pass_ = false;
            if (++failures_ <= kMaxReportedFailures) detail_ << label << "\n";
        }
    }

    VerifyResult result() const { return VerifyResult{name_, pass_, checks_, detail_.str()}; }

    std::string name_;
    bool pass_ = true;
    int checks_ = 0;
    int failures_ = 0;
    std::ostringstream detail_;
};

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> grid;
    grid.reserve(count);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < count; ++i) {
        grid.push_back(std::exp(llo + (lhi - llo) * double(i) / double(count - 1)));
    }
    return grid;
}

ComplexMatrix random_ginibre(Eigen::Index dim, DeterministicRng& rng) {
    ComplexMatrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian()) / std::sqrt(2.0);
        }
    }
    return g;
}

SpdMatrix scalar_spd(double value) {
    return SpdMatrix::diagonal(RealVector::Constant(1, value));
}

double golden_minimize(const std::function<double(double)>& fn, double lo, double hi) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    while (b - a > 1e-10 * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = fn(d);
        }
    }
    return 0.5 * (a + b);
}

// Golden-section localizes a smooth minimum only to ~sqrt(machine eps); polish
// by bisecting the sign of the central finite difference of the objective.
// Still derivative-free in the sense that only objective values are used.
double minimize_scalar(const std::function<double(double)>& fn, double lo, double hi) {
    const double coarse = golden_minimize(fn, lo, hi);
    const double h = 1e-5 * (1.0 + std::abs(coarse));
    double a = std::max(lo, coarse - 1e-3 * (1.0 + std::abs(coarse)));
    double b = std::min(hi, coarse + 1e-3 * (1.0 + std::abs(coarse)));
    auto slope = [&](double y) { return fn(y + h) - fn(y - h); };
    if (!(slope(a) < 0.0 && slope(b) > 0.0)) return coarse;
    for (int i = 0; i < 80 && b - a > 1e-13 * (1.0 + std::abs(b)); ++i) {
        const double mid = 0.5 * (a + b);
        if (slope(mid) <= 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

double rel_diff(const HermitianMatrix& x, const HermitianMatrix& y) {
    return (x - y).frobenius_norm() / (1.0 + y.frobenius_norm());
}

SolverConfig tight_config(double tol) {
    SolverConfig config;
    config.tol = tol;
    return config;
}

SpdMatrix multiplicative_perturbation(const SpdMatrix& x, double epsilon, std::uint64_t seed) {
    HermitianMatrix h = random_hermitian_direction(x.dim(), seed);
    ComplexMatrix c =
        ComplexMatrix::Identity(x.dim(), x.dim()) + epsilon * h.entries();
    return congruence(c, x);
}

// ---------------------------------------------------------------------------

VerifyResult suite_ka_axioms(std::uint64_t seed) {
    Suite suite("ka-axioms");
    std::vector<MeanDescriptor> means;
    for (double p : {0.25, 0.5, 0.75}) {
        means.push_back(MeanDescriptor::arithmetic(p));
        means.push_back(MeanDescriptor::geometric(p));
        means.push_back(MeanDescriptor::harmonic(p));
        means.push_back(MeanDescriptor::ah_geometric(p));
    }
    means.push_back(MeanDescriptor::parallel_sum_connection());

    DeterministicRng rng(seed);
    for (const MeanDescriptor& sigma : means) {
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::Index dim = 2 + trial % 4;
            SpdMatrix a1 = random_spd(dim, 10.0, rng.next_u64());
            SpdMatrix b1 = random_spd(dim, 10.0, rng.next_u64());
            const double sa = 0.1 + 0.9 * rng.next_uniform();
            const double sb = 0.1 + 0.9 * rng.next_uniform();
            SpdMatrix a2(a1.hermitian() + random_spd(dim, 10.0, rng.next_u64()).hermitian() * sa);
            SpdMatrix b2(b1.hermitian() + random_spd(dim, 10.0, rng.next_u64()).hermitian() * sb);

            SpdMatrix m1 = mean(sigma, a1, b1);
            SpdMatrix m2 = mean(sigma, a2, b2);
            {
                std::ostringstream os;
                os << "P1 monotonicity failed for " << sigma.name() << " trial " << trial;
                suite.check(loewner_leq(m1, m2, 1e-9), os.str());
            }
            {
                ComplexMatrix c = random_ginibre(dim, rng);
                SpdMatrix lhs = congruence(c, m1);
                SpdMatrix rhs = mean(sigma, congruence(c, a1), congruence(c, b1));
                std::ostringstream os;
                os << "P2 transformer inequality failed for " << sigma.name() << " trial " << trial;
                suite.check(loewner_leq(lhs, rhs, 1e-9), os.str());
            }
        }
        // P4: I sigma I = f(1) I (f(1) = 1 for means, 1/2 for the parallel sum).
        for (Eigen::Index dim : {2, 5}) {
            SpdMatrix id = SpdMatrix::identity(dim);
            SpdMatrix m = mean(sigma, id, id);
            std::ostringstream os;
            os << "P4 normalization failed for " << sigma.name() << " dim " << dim;
            suite.check(rel_diff(m.hermitian(), id.hermitian() * sigma.f_at_1()) <= 1e-9, os.str());
        }
    }
    return suite.result();
}

VerifyResult suite_generator(std::uint64_t seed) {
    Suite suite("generator");
    (void)seed;  // fully deterministic
    std::vector<MeanDescriptor> descriptors;
    for (double p : {0.25, 0.5, 0.75}) {
        descriptors.push_back(MeanDescriptor::arithmetic(p));
        descriptors.push_back(MeanDescriptor::geometric(p));
        descriptors.push_back(MeanDescriptor::harmonic(p));
        descriptors.push_back(MeanDescriptor::ah_geometric(p));
    }
    descriptors.push_back(MeanDescriptor::heinz(0.25));
    descriptors.push_back(MeanDescriptor::log_mean());
    descriptors.push_back(MeanDescriptor::parallel_sum_connection());
    descriptors.push_back(
        MeanDescriptor::from_measure(GeneratorMeasure::jacobi_power_family(0.3, 32), "jacobi:0.3"));

    const std::vector<double> grid = log_grid(0.1, 10.0, 101);
    auto close_on_grid = [&grid](const MeanDescriptor& u, const MeanDescriptor& v, double tol) {
        for (double x : grid) {
            if (std::abs(u.f(x) - v.f(x)) > tol * (1.0 + std::abs(v.f(x)))) return false;
        }
        return true;
    };

    for (const MeanDescriptor& sigma : descriptors) {
        suite.check(close_on_grid(sigma.adjoint().adjoint(), sigma, 1e-10),
                    "adjoint involution failed for " + sigma.name());
        suite.check(close_on_grid(sigma.transpose().transpose(), sigma, 1e-10),
                    "transpose involution failed for " + sigma.name());
        suite.check(std::abs(sigma.transpose().weight() - (sigma.f_at_1() - sigma.weight())) <= 1e-10,
                    "transpose weight identity failed for " + sigma.name());
        const double fa = sigma.f_at_1();
        suite.check(std::abs(sigma.adjoint().weight() - sigma.weight() / (fa * fa)) <= 1e-10,
                    "adjoint weight identity failed for " + sigma.name());
    }

    // Symmetry of the balanced families, f(x) = x f(1/x) on the grid.
    for (const MeanDescriptor& sigma :
         {MeanDescriptor::geometric(0.5), MeanDescriptor::heinz(0.25), MeanDescriptor::log_mean(),
          MeanDescriptor::parallel_sum_connection()}) {
        suite.check(sigma.is_symmetric(1e-10), "symmetry failed for " + sigma.name());
        suite.check(close_on_grid(sigma.transpose(), sigma, 1e-10),
                    "transpose fixed point failed for " + sigma.name());
    }
    // The unbalanced geometric generator transposes to the mirrored exponent.
    suite.check(close_on_grid(MeanDescriptor::geometric(0.25).transpose(),
                              MeanDescriptor::geometric(0.75), 1e-10),
                "transpose of geometric:0.25 is not geometric:0.75");
    suite.check(close_on_grid(MeanDescriptor::geometric(0.75).transpose(),
                              MeanDescriptor::geometric(0.25), 1e-10),
                "transpose of geometric:0.75 is not geometric:0.25");
    // Harmonic and arithmetic are adjoint to each other.
    for (double p : {0.25, 0.5, 0.75}) {
        suite.check(close_on_grid(MeanDescriptor::harmonic(p).adjoint(),
                                  MeanDescriptor::arithmetic(p), 1e-10),
                    "adjoint of harmonic is not arithmetic");
        suite.check(close_on_grid(MeanDescriptor::arithmetic(p).adjoint(),
                                  MeanDescriptor::harmonic(p), 1e-10),
                    "adjoint of arithmetic is not harmonic");
    }
    return suite.result();
}

VerifyResult suite_convex_order(std::uint64_t seed) {
    Suite suite("convex-order");
    DeterministicRng rng(seed);

    std::vector<GeneratorMeasure> lower;
    std::vector<GeneratorMeasure> upper;
    for (int t = 0; t < 50; ++t) {
        const int count = 1 + t % 4;
        std::vector<WeightedAtom> atoms;
        double total = 0.0;
        for (int k = 0; k < count; ++k) {
            atoms.push_back({0.05 + 0.9 * rng.next_uniform(), 0.1 + rng.next_uniform()});
            total += atoms.back().mass;
        }
        for (WeightedAtom& a : atoms) a.mass /= total;
        GeneratorMeasure mu = GeneratorMeasure::from_atoms(atoms);

        // Martingale dilation: split every atom symmetrically about itself.
        std::vector<WeightedAtom> spread;
        for (const WeightedAtom& a : atoms) {
            const double reach = std::min(a.location, 1.0 - a.location);
            const double d = (0.2 + 0.6 * rng.next_uniform()) * reach;
            spread.push_back({a.location - d, 0.5 * a.mass});
            spread.push_back({a.location + d, 0.5 * a.mass});
        }
        GeneratorMeasure nu = GeneratorMeasure::from_atoms(spread);

        {
            std::ostringstream os;
            os << "dilation pair " << t << " is not convex-ordered";
            suite.check(convex_order_leq(mu, nu), os.str());
        }
        {
            std::ostringstream os;
            os << "strict dilation pair " << t << " is reversed";
            suite.check(!convex_order_leq(nu, mu), os.str());
        }
        bool dominated = true;
        for (double x : log_grid(0.1, 10.0, 41)) {
            if (mu.eval_f(x) > nu.eval_f(x) + 1e-12) dominated = false;
        }
        {
            std::ostringstream os;
            os << "pointwise generator dominance failed for pair " << t;
            suite.check(dominated, os.str());
        }
        lower.push_back(std::move(mu));
        upper.push_back(std::move(nu));
    }

    for (int t = 0; t < 20; ++t) {
        const Eigen::Index dim = 2 + t % 4;
        SpdMatrix a = random_spd(dim, 10.0, rng.next_u64());
        SpdMatrix b = random_spd(dim, 10.0, rng.next_u64());
        MeanDescriptor sig_mu = MeanDescriptor::from_measure(lower[t], "mu");
        MeanDescriptor sig_nu = MeanDescriptor::from_measure(upper[t], "nu");
        {
            std::ostringstream os;
            os << "operator monotonicity in the measure failed for pair " << t;
            suite.check(loewner_leq(mean(sig_mu, a, b), mean(sig_nu, a, b), 1e-9), os.str());
        }
        const double c = lower[t].center_of_mass();
        SpdMatrix middle = mean(sig_mu, a, b);
        SpdMatrix low = mean(MeanDescriptor::harmonic(c), a, b);
        SpdMatrix high = mean(MeanDescriptor::arithmetic(c), a, b);
        {
            std::ostringstream os;
            os << "harmonic envelope failed for measure " << t;
            suite.check(loewner_leq(low, middle, 1e-9), os.str());
        }
        {
            std::ostringstream os;
            os << "arithmetic envelope failed for measure " << t;
            suite.check(loewner_leq(middle, high, 1e-9), os.str());
        }
    }
    return suite.result();
}

VerifyResult suite_power_family(std::uint64_t seed) {
    Suite suite("power-family");
    DeterministicRng rng(seed);
    const std::vector<double> grid = log_grid(0.1, 10.0, 101);
    for (double p : {0.3, 0.5, 0.7}) {
        GeneratorMeasure mu = GeneratorMeasure::jacobi_power_family(p, 64);
        std::ostringstream tagos;
        tagos << "p=" << p;
        const std::string tag = tagos.str();
        suite.check(std::abs(mu.total_mass() - 1.0) <= 1e-12, "total mass drifted for " + tag);
        suite.check(std::abs(mu.center_of_mass() - p) <= 1e-8,
                    "center of mass is not the exponent for " + tag);
        bool f_ok = true;
        bool fp_ok = true;
        for (double x : grid) {
            if (std::abs(mu.eval_f(x) - std::pow(x, p)) > 1e-6) f_ok = false;
            if (std::abs(mu.eval_f_prime(x) - p * std::pow(x, p - 1.0)) > 1e-6) fp_ok = false;
        }
        suite.check(f_ok, "f disagrees with x^p beyond 1e-6 for " + tag);
        suite.check(fp_ok, "f' disagrees with p x^(p-1) beyond 1e-6 for " + tag);
        suite.check(jacobi_doubling_error(p, 64) <= 1e-8, "node doubling drifts f for " + tag);

        MeanDescriptor discrete = MeanDescriptor::from_measure(mu, "jacobi");
        for (int t = 0; t < 5; ++t) {
            const Eigen::Index dim = 2 + t % 3;
            SpdMatrix a = random_spd(dim, 10.0, rng.next_u64());
            SpdMatrix b = random_spd(dim, 10.0, rng.next_u64());
            SpdMatrix via_measure = mean(discrete, a, b);
            SpdMatrix closed = mean(MeanDescriptor::geometric(p), a, b);
            std::ostringstream os;
            os << "operator mean from the measure drifts from the closed form, " << tag
               << " trial " << t;
            suite.check(rel_diff(via_measure.hermitian(), closed.hermitian()) <= 1e-6, os.str());
        }
    }
    return suite.result();
}

VerifyResult suite_karcher(std::uint64_t seed) {
    Suite suite("karcher");
    DeterministicRng rng(seed);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index dim = 2 + t % 4;  // 2..5
        SpdMatrix a = random_spd(dim, 20.0, rng.next_u64());
        SpdMatrix b = random_spd(dim, 20.0, rng.next_u64());
        WeightedEnsemble pair = WeightedEnsemble::equal_weights({a, b});
        SolverResult result = karcher_mean(pair);
        {
            std::ostringstream os;
            os << "two-point solve did not converge, trial " << t;
            suite.check(result.report.converged, os.str());
        }
        SpdMatrix gm = geometric_mean_two(a, b);
        {
            std::ostringstream os;
            os << "two-point mean misses A#B, trial " << t;
            suite.check(rel_diff(result.solution.hermitian(), gm.hermitian()) <= 1e-8, os.str());
        }
        const double res = karcher_residual(pair, result.solution).frobenius_norm();
        {
            std::ostringstream os;
            os << "residual certificate failed, trial " << t;
            suite.check(res <= 1e-10 * (1.0 + result.solution.frobenius_norm()), os.str());
        }
    }
    // Congruence equivariance on three-member ensembles.
    for (int t = 0; t < 10; ++t) {
        const Eigen::Index dim = 2 + t % 3;
        std::vector<SpdMatrix> mats;
        for (int j = 0; j < 3; ++j) mats.push_back(random_spd(dim, 15.0, rng.next_u64()));
        WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(mats);
        ComplexMatrix c = random_ginibre(dim, rng);
        std::vector<SpdMatrix> moved;
        for (const SpdMatrix& m : mats) moved.push_back(congruence(c, m));
        WeightedEnsemble moved_ensemble = WeightedEnsemble::equal_weights(moved);
        SpdMatrix x = karcher_mean(ensemble).solution;
        SpdMatrix y = karcher_mean(moved_ensemble).solution;
        std::ostringstream os;
        os << "congruence equivariance failed, trial " << t;
        suite.check(rel_diff(y.hermitian(), congruence(c, x).hermitian()) <= 1e-8, os.str());
    }
    return suite.result();
}

VerifyResult suite_bw(std::uint64_t seed) {
    Suite suite("bw");
    DeterministicRng rng(seed);
    // Residual certificates on general ensembles.
    for (int t = 0; t < 15; ++t) {
        const Eigen::Index dim = 2 + t % 4;
        std::vector<SpdMatrix> mats;
        for (int j = 0; j < 2 + t % 3; ++j) mats.push_back(random_spd(dim, 15.0, rng.next_u64()));
        WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(mats);
        SolverResult result = bw_barycenter(ensemble);
        {
            std::ostringstream os;
            os << "solver did not converge, trial " << t;
            suite.check(result.report.converged, os.str());
        }
        const double res =
            (bw_fixed_point_map(ensemble, result.solution) - result.solution.hermitian())
                .frobenius_norm();
        std::ostringstream os;
        os << "fixed point residual certificate failed, trial " << t;
        suite.check(res <= 1e-10 * (1.0 + result.solution.frobenius_norm()), os.str());
    }
    // Scalar ensembles against the closed form (sum w sqrt(a))^2.
    for (int t = 0; t < 10; ++t) {
        const int count = 2 + t % 4;
        std::vector<SpdMatrix> mats;
        std::vector<double> weights;
        double total = 0.0;
        double expected_root = 0.0;
        std::vector<double> values;
        for (int j = 0; j < count; ++j) {
            values.push_back(0.5 + 4.5 * rng.next_uniform());
            weights.push_back(0.1 + rng.next_uniform());
            total += weights.back();
        }
        for (int j = 0; j < count; ++j) {
            weights[j] /= total;
            mats.push_back(scalar_spd(values[j]));
            expected_root += weights[j] * std::sqrt(values[j]);
        }
        const double expected = expected_root * expected_root;
        SolverResult result = bw_barycenter(WeightedEnsemble(mats, weights), tight_config(1e-14));
        const double got = result.solution.entries()(0, 0).real();
        std::ostringstream os;
        os << "scalar closed form missed: got " << got << ", expected " << expected;
        suite.check(std::abs(got - expected) <= 1e-12 * (1.0 + expected), os.str());
    }
    // Commuting (diagonal) ensembles reduce entrywise to the scalar closed form.
    for (int t = 0; t < 5; ++t) {
        const Eigen::Index dim = 3;
        std::vector<SpdMatrix> mats;
        std::vector<RealVector> diags;
        for (int j = 0; j < 3; ++j) {
            RealVector d(dim);
            for (Eigen::Index i = 0; i < dim; ++i) d(i) = 0.5 + 4.5 * rng.next_uniform();
            diags.push_back(d);
            mats.push_back(SpdMatrix::diagonal(d));
        }
        WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(mats);
        SolverResult result = bw_barycenter(ensemble, tight_config(1e-14));
        bool ok = true;
        for (Eigen::Index i = 0; i < dim; ++i) {
            double root = 0.0;
            for (int j = 0; j < 3; ++j) root += std::sqrt(diags[j](i)) / 3.0;
            const double expected = root * root;
            if (std::abs(result.solution.entries()(i, i).real() - expected) >
                1e-12 * (1.0 + expected)) {
                ok = false;
            }
        }
        std::ostringstream os;
        os << "diagonal ensemble closed form missed, trial " << t;
        suite.check(ok, os.str());
    }
    // Two-point barycenters beat multiplicative perturbations of the objective.
    for (double t : {0.25, 0.5, 0.75}) {
        SpdMatrix a = random_spd(3, 15.0, rng.next_u64());
        SpdMatrix b = random_spd(3, 15.0, rng.next_u64());
        WeightedEnsemble pair({a, b}, {1.0 - t, t});
        SolverResult result = bw_barycenter(pair);
        const double best = loss_Q(LossSpec::bw(), pair, result.solution);
        bool beaten = false;
        for (int k = 0; k < 200; ++k) {
            SpdMatrix moved = multiplicative_perturbation(result.solution, 1e-2, rng.next_u64());
            const double q = loss_Q(LossSpec::bw(), pair, moved);
            if (q < best - 1e-10 * (1.0 + std::abs(best))) beaten = true;
        }
        std::ostringstream os;
        os << "a perturbation beat the two-point barycenter at t=" << t;
        suite.check(!beaten, os.str());
    }
    return suite.result();
}

VerifyResult suite_hellinger(std::uint64_t seed) {
    Suite suite("hellinger");
    DeterministicRng rng(seed);
    std::vector<std::pair<std::string, GeneratorMeasure>> measures;
    measures.emplace_back("dirac:0.25", GeneratorMeasure::dirac(0.25));
    measures.emplace_back("dirac:0.5", GeneratorMeasure::dirac(0.5));
    measures.emplace_back("dirac:0.75", GeneratorMeasure::dirac(0.75));
    measures.emplace_back("jacobi:0.5", GeneratorMeasure::jacobi_power_family(0.5, 64));

    for (const auto& [name, mu] : measures) {
        for (int t = 0; t < 3; ++t) {
            const Eigen::Index dim = 2 + t;
            std::vector<SpdMatrix> mats;
            for (int j = 0; j < 3; ++j) mats.push_back(random_spd(dim, 15.0, rng.next_u64()));
            WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(mats);
            SolverResult result = hellinger_barycenter(mu, ensemble);
            {
                std::ostringstream os;
                os << name << ": solver did not converge, trial " << t;
                suite.check(result.report.converged, os.str());
            }
            const double res =
                hellinger_stationarity_residual(mu, ensemble, result.solution).frobenius_norm();
            {
                std::ostringstream os;
                os << name << ": stationarity identity failed, trial " << t;
                suite.check(res <= 1e-8 * (1.0 + result.solution.frobenius_norm()), os.str());
            }
            if (t == 0) {
                const double best = loss_Q(LossSpec::hellinger(mu), ensemble, result.solution);
                bool beaten = false;
                for (int k = 0; k < 200; ++k) {
                    SpdMatrix moved =
                        multiplicative_perturbation(result.solution, 1e-2, rng.next_u64());
                    const double q = loss_Q(LossSpec::hellinger(mu), ensemble, moved);
                    if (q < best - 1e-10 * (1.0 + std::abs(best))) beaten = true;
                }
                std::ostringstream os;
                os << name << ": a perturbation beat the barycenter";
                suite.check(!beaten, os.str());
            }
        }
        // Scalar case against a golden-section search on the objective.
        for (int t = 0; t < 3; ++t) {
            std::vector<SpdMatrix> mats;
            std::vector<double> weights;
            double total = 0.0;
            double lo = 1e300;
            double hi = 0.0;
            for (int j = 0; j < 3; ++j) {
                const double v = 0.5 + 4.5 * rng.next_uniform();
                mats.push_back(scalar_spd(v));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                weights.push_back(0.1 + rng.next_uniform());
                total += weights.back();
            }
            for (double& w : weights) w /= total;
            WeightedEnsemble ensemble(mats, weights);
            SolverResult result = hellinger_barycenter(mu, ensemble, tight_config(1e-13));
            auto objective = [&](double x) {
                double q = 0.0;
                for (std::size_t j = 0; j < ensemble.size(); ++j) {
                    q += ensemble.weight(j) * phi_mu(mu, ensemble.matrix(j), scalar_spd(x));
                }
                return q;
            };
            const double oracle = minimize_scalar(objective, 0.25 * lo, 4.0 * hi);
            const double got = result.solution.entries()(0, 0).real();
            std::ostringstream os;
            os << name << ": scalar barycenter " << got << " disagrees with golden-section "
               << oracle << " (gap " << got - oracle << ")";
            suite.check(std::abs(got - oracle) <= 1e-8 * (1.0 + oracle), os.str());
        }
    }
    return suite.result();
}

VerifyResult suite_sigma(std::uint64_t seed) {
    Suite suite("sigma");
    DeterministicRng rng(seed);
    const std::vector<MeanDescriptor> sigmas = {
        MeanDescriptor::geometric(0.5), MeanDescriptor::heinz(0.25), MeanDescriptor::log_mean()};

    // m = 2, equal weights: the barycenter recovers the two-variable mean.
    for (const MeanDescriptor& sigma : sigmas) {
        for (int t = 0; t < 6; ++t) {
            const Eigen::Index dim = 2 + t % 3;
            SpdMatrix a = random_spd(dim, 12.0, rng.next_u64());
            SpdMatrix b = random_spd(dim, 12.0, rng.next_u64());
            WeightedEnsemble pair = WeightedEnsemble::equal_weights({a, b});
            SolverResult result = ka_barycenter(sigma, pair);
            {
                std::ostringstream os;
                os << sigma.name() << ": two-point solve did not converge, trial " << t;
                suite.check(result.report.converged, os.str());
            }
            SpdMatrix expected = mean(sigma, a, b);
            std::ostringstream os;
            os << sigma.name() << ": two-point barycenter misses the mean, trial " << t;
            suite.check(rel_diff(result.solution.hermitian(), expected.hermitian()) <= 1e-8,
                        os.str());
        }
    }

    // sigma = #: closed form H # A and the Riccati identity.
    for (int t = 0; t < 8; ++t) {
        const Eigen::Index dim = 2 + t % 3;
        const int count = 3 + t % 3;
        std::vector<SpdMatrix> mats;
        std::vector<double> weights;
        double total = 0.0;
        for (int j = 0; j < count; ++j) {
            mats.push_back(random_spd(dim, 12.0, rng.next_u64()));
            weights.push_back(0.2 + rng.next_uniform());
            total += weights.back();
        }
        for (double& w : weights) w /= total;
        WeightedEnsemble ensemble(mats, weights);
        SolverResult result = ka_barycenter(MeanDescriptor::geometric(0.5), ensemble);
        SpdMatrix closed = geometric_barycenter_closed_form(ensemble);
        {
            std::ostringstream os;
            os << "geometric barycenter misses H # A, trial " << t;
            suite.check(rel_diff(result.solution.hermitian(), closed.hermitian()) <= 1e-8, os.str());
        }
        // Riccati identity X (sum w A^{-1}) X = sum w A for both solutions.
        SpdMatrix arith = ensemble.arithmetic_mean();
        ComplexMatrix hinv = ComplexMatrix::Zero(dim, dim);
        for (std::size_t j = 0; j < ensemble.size(); ++j) {
            hinv += ensemble.weight(j) * spd_inverse(ensemble.matrix(j)).entries();
        }
        auto riccati_gap = [&](const SpdMatrix& x) {
            return (HermitianMatrix(ComplexMatrix(x.entries() * hinv * x.entries())) -
                    arith.hermitian())
                       .frobenius_norm() /
                   (1.0 + arith.frobenius_norm());
        };
        {
            std::ostringstream os;
            os << "Riccati identity failed for the iterative solution, trial " << t;
            suite.check(riccati_gap(result.solution) <= 1e-9, os.str());
        }
        {
            std::ostringstream os;
            os << "Riccati identity failed for the closed form, trial " << t;
            suite.check(riccati_gap(closed) <= 1e-9, os.str());
        }
    }

    // m = 2 with weights (1-alpha, alpha): (A1 !a A2) # (A1 grad_a A2).
    for (double alpha : {0.25, 0.5, 0.75}) {
        SpdMatrix a = random_spd(3, 12.0, rng.next_u64());
        SpdMatrix b = random_spd(3, 12.0, rng.next_u64());
        WeightedEnsemble pair({a, b}, {1.0 - alpha, alpha});
        SolverResult result = ka_barycenter(MeanDescriptor::geometric(0.5), pair);
        SpdMatrix harm = mean(MeanDescriptor::harmonic(alpha), a, b);
        SpdMatrix arith = mean(MeanDescriptor::arithmetic(alpha), a, b);
        SpdMatrix expected = geometric_mean_two(harm, arith);
        std::ostringstream os;
        os << "weighted two-point geometric barycenter missed, alpha=" << alpha;
        suite.check(rel_diff(result.solution.hermitian(), expected.hermitian()) <= 1e-8, os.str());
    }
    return suite.result();
}

VerifyResult suite_gradients(std::uint64_t seed) {
    Suite suite("gradients");
    DeterministicRng rng(seed);
    std::vector<std::pair<std::string, LossSpec>> losses;
    losses.emplace_back("rtm", LossSpec::rtm());
    losses.emplace_back("bw", LossSpec::bw());
    losses.emplace_back("hellinger", LossSpec::hellinger(GeneratorMeasure::jacobi_power_family(0.5, 32)));
    losses.emplace_back("sigma", LossSpec::sigma(MeanDescriptor::heinz(0.25)));

    for (const auto& [name, loss] : losses) {
        for (int t = 0; t < 10; ++t) {
            const Eigen::Index dim = 2 + t % 3;
            std::vector<SpdMatrix> mats;
            for (int j = 0; j < 3; ++j) mats.push_back(random_spd(dim, 10.0, rng.next_u64()));
            WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(mats);
            SpdMatrix x = random_spd(dim, 10.0, rng.next_u64());
            const double worst = gradient_check(loss, ensemble, x, 1e-5, 10, rng.next_u64());
            std::ostringstream os;
            os << name << ": gradient check " << worst << " exceeds 1e-5 at base point " << t;
            suite.check(worst <= 1e-5, os.str());
        }
    }
    return suite.result();
}

VerifyResult suite_consistency(std::uint64_t seed) {
    Suite suite("consistency");
    DeterministicRng rng(seed);
    GeneratorMeasure jacobi = GeneratorMeasure::jacobi_power_family(0.5, 48);
    auto solve = [&](int which, const WeightedEnsemble& ensemble, InitStrategy init) {
        SolverConfig config;
        config.init = init;
        switch (which) {
            case 0: return karcher_mean(ensemble, config);
            case 1: return bw_barycenter(ensemble, config);
            case 2: return hellinger_barycenter(jacobi, ensemble, config);
            default: return ka_barycenter(MeanDescriptor::heinz(0.25), ensemble, config);
        }
    };
    const char* names[] = {"karcher", "bw", "hellinger", "sigma(heinz)"};
    for (int which = 0; which < 4; ++which) {
        for (int t = 0; t < 3; ++t) {
            const Eigen::Index dim = 2 + t;
            std::vector<SpdMatrix> mats;
            for (int j = 0; j < 3; ++j) mats.push_back(random_spd(dim, 15.0, rng.next_u64()));
            WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(mats);
            SolverResult from_arith = solve(which, ensemble, InitStrategy::arithmetic);
            SolverResult from_harm = solve(which, ensemble, InitStrategy::harmonic);
            SolverResult from_geo = solve(which, ensemble, InitStrategy::ah_geometric);
            const double gap =
                std::max(rel_diff(from_harm.solution.hermitian(), from_arith.solution.hermitian()),
                         rel_diff(from_geo.solution.hermitian(), from_arith.solution.hermitian()));
            std::ostringstream os;
            os << names[which] << ": initializations disagree by " << gap << ", trial " << t;
            suite.check(gap <= 1e-6, os.str());
        }
    }
    return suite.result();
}

} // namespace

std::vector<std::string> verify_suite_names() {
    return {"ka-axioms", "generator", "convex-order", "power-family", "karcher",
            "bw",        "hellinger", "sigma",        "gradients",    "consistency"};
}

VerifyResult run_verify_suite(const std::string& name, std::uint64_t seed) {
    if (name == "ka-axioms") return suite_ka_axioms(seed);
    if (name == "generator") return suite_generator(seed);
    if (name == "convex-order") return suite_convex_order(seed);
    if (name == "power-family") return suite_power_family(seed);
    if (name == "karcher") return suite_karcher(seed);
    if (name == "bw") return suite_bw(seed);
    if (name == "hellinger") return suite_hellinger(seed);
    if (name == "sigma") return suite_sigma(seed);
    if (name == "gradients") return suite_gradients(seed);
    if (name == "consistency") return suite_consistency(seed);
    throw ParseError("unknown verify suite '" + name + "'");
}

} // namespace opmean
