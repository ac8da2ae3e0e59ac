#include "doctest.h"

#include <cmath>

#include "opmean/barycenter.hpp"
#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

using namespace opmean;

namespace {

SpdMatrix scalar(double v) { return SpdMatrix::diagonal(RealVector::Constant(1, v)); }

double scalar_value(const SpdMatrix& x) { return x.entries()(0, 0).real(); }

double rel_gap(const SpdMatrix& x, const SpdMatrix& y) {
    return (x.hermitian() - y.hermitian()).frobenius_norm() / (1.0 + y.frobenius_norm());
}

WeightedEnsemble random_ensemble(int m, Eigen::Index dim, std::uint64_t seed, double cond = 15.0) {
    DeterministicRng rng(seed);
    std::vector<SpdMatrix> mats;
    for (int j = 0; j < m; ++j) mats.push_back(random_spd(dim, cond, rng.next_u64()));
    return WeightedEnsemble::equal_weights(mats);
}

} // namespace

TEST_CASE("ensemble validation") {
    SpdMatrix a = scalar(1.0);
    SpdMatrix b2 = SpdMatrix::identity(2);
    CHECK_THROWS_AS(WeightedEnsemble({}, {}), DomainError);
    CHECK_THROWS_AS(WeightedEnsemble({a}, {0.5, 0.5}), DomainError);           // size mismatch
    CHECK_THROWS_AS(WeightedEnsemble({a, b2}, {0.5, 0.5}), DomainError);       // dim mismatch
    CHECK_THROWS_AS(WeightedEnsemble({a, a}, {0.6, 0.6}), DomainError);        // sum != 1
    CHECK_THROWS_AS(WeightedEnsemble({a, a}, {1.2, -0.2}), DomainError);       // negative weight
    WeightedEnsemble e = WeightedEnsemble::equal_weights({a, a, a});
    CHECK(e.weight(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ensemble arithmetic and harmonic means on scalars") {
    WeightedEnsemble e({scalar(1.0), scalar(4.0)}, {0.5, 0.5});
    CHECK(scalar_value(e.arithmetic_mean()) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(scalar_value(e.harmonic_mean()) == doctest::Approx(1.6).epsilon(1e-14));
}

TEST_CASE("solver config validation") {
    WeightedEnsemble e({scalar(1.0), scalar(4.0)}, {0.5, 0.5});
    SolverConfig bad;
    bad.tol = -1.0;
    CHECK_THROWS_AS(karcher_mean(e, bad), DomainError);
    bad = SolverConfig{};
    bad.max_iter = 0;
    CHECK_THROWS_AS(bw_barycenter(e, bad), DomainError);
    bad = SolverConfig{};
    bad.damping = 0.0;
    CHECK_THROWS_AS(karcher_mean(e, bad), DomainError);
    bad = SolverConfig{};
    bad.init = InitStrategy::explicit_matrix;  // no matrix supplied
    CHECK_THROWS_AS(karcher_mean(e, bad), DomainError);
}

TEST_CASE("karcher mean of a single matrix is that matrix with zero iterations") {
    SpdMatrix a = random_spd(3, 20.0, 91);
    SolverResult r = karcher_mean(WeightedEnsemble::equal_weights({a}));
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 0);
    CHECK(rel_gap(r.solution, a) < 1e-13);
}

TEST_CASE("karcher mean interpolates scalars geometrically") {
    SolverResult r = karcher_mean(WeightedEnsemble({scalar(1.0), scalar(16.0)}, {0.25, 0.75}));
    CHECK(r.report.converged);
    CHECK(scalar_value(r.solution) == doctest::Approx(8.0).epsilon(1e-10));  // 16^(3/4)
}

TEST_CASE("two-point karcher mean is the geometric mean") {
    SpdMatrix a = random_spd(4, 30.0, 92);
    SpdMatrix b = random_spd(4, 30.0, 93);
    SolverResult r = karcher_mean(WeightedEnsemble::equal_weights({a, b}));
    CHECK(r.report.converged);
    CHECK(rel_gap(r.solution, geometric_mean_two(a, b)) < 1e-9);
    const double res = karcher_residual(WeightedEnsemble::equal_weights({a, b}), r.solution)
                           .frobenius_norm();
    CHECK(res <= 1e-10 * (1.0 + r.solution.frobenius_norm()));
}

TEST_CASE("bw barycenter matches scalar closed forms") {
    SolverConfig tight;
    tight.tol = 1e-14;
    SolverResult equal =
        bw_barycenter(WeightedEnsemble({scalar(1.0), scalar(9.0)}, {0.5, 0.5}), tight);
    CHECK(equal.report.converged);
    CHECK(scalar_value(equal.solution) == doctest::Approx(4.0).epsilon(1e-11));

    SolverResult weighted =
        bw_barycenter(WeightedEnsemble({scalar(1.0), scalar(9.0)}, {0.25, 0.75}), tight);
    CHECK(scalar_value(weighted.solution) == doctest::Approx(6.25).epsilon(1e-11));
}

TEST_CASE("bw barycenter satisfies its fixed point equation") {
    WeightedEnsemble e = random_ensemble(4, 3, 94);
    SolverResult r = bw_barycenter(e);
    CHECK(r.report.converged);
    const double gap =
        (bw_fixed_point_map(e, r.solution) - r.solution.hermitian()).frobenius_norm();
    CHECK(gap <= 1e-10 * (1.0 + r.solution.frobenius_norm()));
}

TEST_CASE("hellinger barycenter hits the frozen scalar oracles") {
    GeneratorMeasure half = GeneratorMeasure::dirac(0.5);
    SolverResult equal =
        hellinger_barycenter(half, WeightedEnsemble({scalar(1.0), scalar(4.0)}, {0.5, 0.5}));
    CHECK(equal.report.converged);
    CHECK(scalar_value(equal.solution) == doctest::Approx(2.2727350849857538).epsilon(1e-9));
    CHECK(equal.report.objective == doctest::Approx(0.24264382959465382).epsilon(1e-10));

    SolverResult weighted =
        hellinger_barycenter(half, WeightedEnsemble({scalar(1.0), scalar(4.0)}, {0.25, 0.75}));
    CHECK(scalar_value(weighted.solution) == doctest::Approx(3.1396489477140218).epsilon(1e-9));
}

TEST_CASE("hellinger barycenter refuses measures supported on the endpoints") {
    WeightedEnsemble e({scalar(1.0), scalar(4.0)}, {0.5, 0.5});
    CHECK_THROWS_AS(hellinger_barycenter(GeneratorMeasure::endpoint_atoms(0.5), e),
                    DegenerateError);
    CHECK_THROWS_AS(hellinger_barycenter(GeneratorMeasure::dirac(0.0), e), DegenerateError);
    CHECK_THROWS_AS(hellinger_barycenter(GeneratorMeasure::dirac(1.0), e), DegenerateError);
}

TEST_CASE("hellinger stationarity residual vanishes at the solution") {
    GeneratorMeasure mu = GeneratorMeasure::from_atoms({{0.25, 0.5}, {0.75, 0.5}});
    WeightedEnsemble e = random_ensemble(3, 3, 95);
    SolverResult r = hellinger_barycenter(mu, e);
    CHECK(r.report.converged);
    const double res = hellinger_stationarity_residual(mu, e, r.solution).frobenius_norm();
    CHECK(res <= 1e-9 * (1.0 + r.solution.frobenius_norm()));
    // The Picard map fixes the solution.
    CHECK(rel_gap(hellinger_fixed_point_map(mu, e, r.solution), r.solution) < 1e-9);
}

TEST_CASE("sigma barycenter with the geometric mean matches the closed form") {
    WeightedEnsemble e = random_ensemble(3, 3, 96);
    SolverResult r = ka_barycenter(MeanDescriptor::geometric(0.5), e);
    CHECK(r.report.converged);
    CHECK(rel_gap(r.solution, geometric_barycenter_closed_form(e)) < 1e-8);
    const double res = sigma_critical_residual(MeanDescriptor::geometric(0.5), e, r.solution)
                           .frobenius_norm();
    CHECK(res <= 1e-8);
}

TEST_CASE("sigma barycenter of two matrices recovers the two-variable mean") {
    SpdMatrix a = random_spd(3, 12.0, 97);
    SpdMatrix b = random_spd(3, 12.0, 98);
    WeightedEnsemble pair = WeightedEnsemble::equal_weights({a, b});
    SolverResult r = ka_barycenter(MeanDescriptor::heinz(0.25), pair);
    CHECK(r.report.converged);
    CHECK(rel_gap(r.solution, mean(MeanDescriptor::heinz(0.25), a, b)) < 1e-8);
}

TEST_CASE("sigma barycenter refuses asymmetric or non-surjective means") {
    WeightedEnsemble e({scalar(1.0), scalar(4.0)}, {0.5, 0.5});
    CHECK_THROWS_AS(ka_barycenter(MeanDescriptor::geometric(0.25), e), DomainError);
    CHECK_THROWS_AS(ka_barycenter(MeanDescriptor::harmonic(0.5), e), DomainError);
}

TEST_CASE("explicit initialization at the solution short-circuits the solvers") {
    WeightedEnsemble e({scalar(1.0), scalar(9.0)}, {0.5, 0.5});
    SolverConfig config;
    config.init = InitStrategy::explicit_matrix;
    config.init_matrix = scalar(4.0);
    SolverResult r = bw_barycenter(e, config);
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 0);
    CHECK(scalar_value(r.solution) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("non-convergence is reported, not thrown") {
    WeightedEnsemble e = random_ensemble(3, 4, 99, 40.0);
    SolverConfig config;
    config.tol = 1e-15;
    config.max_iter = 1;
    SolverResult r = karcher_mean(e, config);
    CHECK(!r.report.converged);
    CHECK(r.report.iterations <= 1);
    CHECK(r.report.final_residual > 0.0);
}

TEST_CASE("solver reports are internally consistent") {
    WeightedEnsemble e = random_ensemble(3, 3, 101);
    for (int which = 0; which < 2; ++which) {
        SolverResult r = which == 0 ? karcher_mean(e) : bw_barycenter(e);
        REQUIRE(!r.report.residual_history.empty());
        CHECK(r.report.iterations + 1 == int(r.report.residual_history.size()));
        CHECK(r.report.final_residual == doctest::Approx(r.report.residual_history.back()));
        for (double v : r.report.residual_history) CHECK(std::isfinite(v));
        CHECK(r.report.wall_time_sec >= 0.0);
    }
}

TEST_CASE("loss values and gradients are mutually consistent") {
    // Scalar rtm loss at x=1 for members (1, e^2): Q = 0.5*0 + 0.5*4 = 2.
    WeightedEnsemble e({scalar(1.0), scalar(std::exp(2.0))}, {0.5, 0.5});
    CHECK(loss_Q(LossSpec::rtm(), e, scalar(1.0)) == doctest::Approx(2.0).epsilon(1e-12));

    // Gradient vanishes at the minimizer.
    WeightedEnsemble e3 = random_ensemble(3, 3, 102);
    SolverResult karcher = karcher_mean(e3);
    CHECK(loss_gradient(LossSpec::rtm(), e3, karcher.solution).frobenius_norm() < 1e-8);
    SolverResult bw = bw_barycenter(e3);
    CHECK(loss_gradient(LossSpec::bw(), e3, bw.solution).frobenius_norm() < 1e-8);

    // Finite differences confirm the analytic gradients.
    SpdMatrix x = random_spd(3, 10.0, 103);
    CHECK(gradient_check(LossSpec::rtm(), e3, x, 1e-5, 6, 104) < 1e-5);
    CHECK(gradient_check(LossSpec::hellinger(GeneratorMeasure::dirac(0.5)), e3, x, 1e-5, 6, 105) <
          1e-5);
}

TEST_CASE("objective recorded in the report equals the loss at the solution") {
    WeightedEnsemble e = random_ensemble(3, 3, 106);
    SolverResult r = bw_barycenter(e);
    CHECK(r.report.objective == doctest::Approx(loss_Q(LossSpec::bw(), e, r.solution)).epsilon(1e-12));
}
