#include "doctest.h"

#include <cmath>

#include "opmean/errors.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

using namespace opmean;

namespace {

SpdMatrix scalar(double v) { return SpdMatrix::diagonal(RealVector::Constant(1, v)); }

double scalar_mean(const MeanDescriptor& sigma, double a, double b) {
    return mean(sigma, scalar(a), scalar(b)).entries()(0, 0).real();
}

double rel_gap(const SpdMatrix& x, const SpdMatrix& y) {
    return (x.hermitian() - y.hermitian()).frobenius_norm() / (1.0 + y.frobenius_norm());
}

} // namespace

TEST_CASE("named families evaluate to their scalar closed forms") {
    CHECK(scalar_mean(MeanDescriptor::arithmetic(0.25), 1.0, 5.0) == doctest::Approx(2.0));
    CHECK(scalar_mean(MeanDescriptor::geometric(0.5), 1.0, 4.0) == doctest::Approx(2.0));
    CHECK(scalar_mean(MeanDescriptor::geometric(0.25), 1.0, 16.0) == doctest::Approx(2.0));
    CHECK(scalar_mean(MeanDescriptor::harmonic(0.5), 1.0, 4.0) == doctest::Approx(1.6));
    CHECK(scalar_mean(MeanDescriptor::heinz(0.25), 1.0, 16.0) == doctest::Approx(5.0));
    CHECK(scalar_mean(MeanDescriptor::log_mean(), 1.0, std::exp(1.0)) ==
          doctest::Approx(1.7182818284590452).epsilon(1e-13));
    CHECK(scalar_mean(MeanDescriptor::parallel_sum_connection(), 1.0, 4.0) ==
          doctest::Approx(0.8));
}

TEST_CASE("geometric mean of commuting matrices is entrywise") {
    RealVector da(2), db(2);
    da << 1.0, 1.0;
    db << 4.0, 9.0;
    SpdMatrix m = mean(MeanDescriptor::geometric(0.5), SpdMatrix::diagonal(da),
                       SpdMatrix::diagonal(db));
    CHECK(m.entries()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(m.entries()(1, 1).real() == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(std::abs(m.entries()(0, 1)) < 1e-13);
}

TEST_CASE("idempotence: A sigma A = A for every mean") {
    SpdMatrix a = random_spd(4, 30.0, 11);
    for (const MeanDescriptor& sigma :
         {MeanDescriptor::arithmetic(0.3), MeanDescriptor::geometric(0.7),
          MeanDescriptor::harmonic(0.2), MeanDescriptor::ah_geometric(0.25),
          MeanDescriptor::heinz(0.25), MeanDescriptor::log_mean()}) {
        CHECK(rel_gap(mean(sigma, a, a), a) < 1e-12);
    }
}

TEST_CASE("log-mean generator is smooth through x = 1") {
    MeanDescriptor lm = MeanDescriptor::log_mean();
    CHECK(lm.f(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lm.f_prime(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    // Against the direct formula where it is well-conditioned...
    for (double u : {1e-3, 1e-2, 0.1}) {
        CHECK(lm.f(1.0 + u) == doctest::Approx(u / std::log1p(u)).epsilon(1e-10));
        CHECK(lm.f(1.0 - u) == doctest::Approx(-u / std::log(1.0 - u)).epsilon(1e-10));
    }
    // ...and against the leading Taylor term where it is not.
    CHECK(std::abs(lm.f(1.0 + 1e-8) - (1.0 + 5e-9)) < 1e-15);
    CHECK(std::abs(lm.f(1.0 - 1e-8) - (1.0 - 5e-9)) < 1e-15);
}

TEST_CASE("weights W(sigma) = f'(1) match the family parameters") {
    CHECK(MeanDescriptor::arithmetic(0.3).weight() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(MeanDescriptor::geometric(0.7).weight() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(MeanDescriptor::harmonic(0.4).weight() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(MeanDescriptor::ah_geometric(0.25).weight() == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(MeanDescriptor::heinz(0.25).weight() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(MeanDescriptor::log_mean().weight() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(MeanDescriptor::parallel_sum_connection().f_at_1() == doctest::Approx(0.5));
    CHECK(MeanDescriptor::geometric(0.5).f_at_1() == doctest::Approx(1.0));
}

TEST_CASE("family parameters are restricted to the open interval") {
    CHECK_THROWS_AS(MeanDescriptor::arithmetic(0.0), DomainError);
    CHECK_THROWS_AS(MeanDescriptor::geometric(1.0), DomainError);
    CHECK_THROWS_AS(MeanDescriptor::harmonic(-0.1), DomainError);
    CHECK_THROWS_AS(MeanDescriptor::heinz(1.2), DomainError);
}

TEST_CASE("transpose swaps the mean's arguments at the matrix level") {
    SpdMatrix a = random_spd(3, 20.0, 21);
    SpdMatrix b = random_spd(3, 20.0, 22);
    for (const MeanDescriptor& sigma :
         {MeanDescriptor::geometric(0.3), MeanDescriptor::harmonic(0.7),
          MeanDescriptor::ah_geometric(0.25),
          MeanDescriptor::from_measure(GeneratorMeasure::jacobi_power_family(0.3, 32), "jacobi")}) {
        CHECK(rel_gap(mean(sigma.transpose(), a, b), mean(sigma, b, a)) < 1e-10);
    }
}

TEST_CASE("adjoint inverts the mean of the inverses") {
    SpdMatrix a = random_spd(3, 20.0, 31);
    SpdMatrix b = random_spd(3, 20.0, 32);
    for (const MeanDescriptor& sigma :
         {MeanDescriptor::geometric(0.3), MeanDescriptor::arithmetic(0.4),
          MeanDescriptor::heinz(0.25)}) {
        SpdMatrix lhs = mean(sigma.adjoint(), a, b);
        SpdMatrix rhs = spd_inverse(mean(sigma, spd_inverse(a), spd_inverse(b)));
        CHECK(rel_gap(lhs, rhs) < 1e-11);
    }
}

TEST_CASE("means commute with congruence by invertible matrices") {
    SpdMatrix a = random_spd(3, 15.0, 41);
    SpdMatrix b = random_spd(3, 15.0, 42);
    ComplexMatrix c(3, 3);
    c << Complex(1.0, 0.2), Complex(0.3, 0.0), Complex(0.0, -0.4),
         Complex(0.1, 0.0), Complex(2.0, 0.0), Complex(0.5, 0.1),
         Complex(0.0, 0.3), Complex(0.2, -0.2), Complex(1.5, 0.0);
    for (const MeanDescriptor& sigma :
         {MeanDescriptor::geometric(0.5), MeanDescriptor::ah_geometric(0.75)}) {
        SpdMatrix lhs = congruence(c, mean(sigma, a, b));
        SpdMatrix rhs = mean(sigma, congruence(c, a), congruence(c, b));
        CHECK(rel_gap(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("parallel sum matches its connection descriptor and scalar value") {
    SpdMatrix a = random_spd(3, 10.0, 51);
    SpdMatrix b = random_spd(3, 10.0, 52);
    CHECK(rel_gap(parallel_sum(a, b), mean(MeanDescriptor::parallel_sum_connection(), a, b)) <
          1e-11);
}

TEST_CASE("generator inverses round trip, closed-form or numeric") {
    MeanDescriptor geo = MeanDescriptor::geometric(0.25);
    CHECK(geo.f_inverse(2.0) == doctest::Approx(16.0).epsilon(1e-12));

    MeanDescriptor hz = MeanDescriptor::heinz(0.25);
    for (double x : {0.2, 0.9, 3.0, 20.0}) {
        CHECK(hz.f_inverse(hz.f(x)) == doctest::Approx(x).epsilon(1e-9));
    }

    // Bounded range: harmonic(0.5) has sup f = 2; values above are rejected.
    MeanDescriptor harm = MeanDescriptor::harmonic(0.5);
    CHECK(harm.range_hi() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(harm.f_inverse(2.5), DomainError);
    CHECK(!harm.has_full_range());
    CHECK(MeanDescriptor::geometric(0.5).has_full_range());
    CHECK(MeanDescriptor::log_mean().has_full_range());
}

TEST_CASE("invert_increasing solves monotone scalar equations") {
    const double root = invert_increasing([](double x) { return x * x * x; },
                                          [](double x) { return 3.0 * x * x; }, 27.0);
    CHECK(root == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("symmetry detection distinguishes balanced from unbalanced generators") {
    CHECK(MeanDescriptor::geometric(0.5).is_symmetric());
    CHECK(MeanDescriptor::heinz(0.25).is_symmetric());
    CHECK(MeanDescriptor::log_mean().is_symmetric());
    CHECK(!MeanDescriptor::geometric(0.25).is_symmetric());
    CHECK(!MeanDescriptor::arithmetic(0.3).is_symmetric());
}

TEST_CASE("from_generator validates normalization") {
    GeneratorTriple doubled;
    doubled.f = [](double x) { return 2.0 * x; };
    doubled.f_prime = [](double) { return 2.0; };
    CHECK_THROWS_AS(MeanDescriptor::from_generator(doubled, "doubled"), DomainError);
    CHECK_NOTHROW(MeanDescriptor::from_generator(doubled, "doubled-conn", false));
}

TEST_CASE("measure-form descriptors report their measure") {
    MeanDescriptor m =
        MeanDescriptor::from_measure(GeneratorMeasure::dirac(0.5), "harmonic-by-measure");
    CHECK(m.has_measure());
    CHECK(m.measure().center_of_mass() == doctest::Approx(0.5));
    CHECK(!MeanDescriptor::heinz(0.25).has_measure());
    CHECK(scalar_mean(m, 1.0, 4.0) == doctest::Approx(1.6).epsilon(1e-13));
}
