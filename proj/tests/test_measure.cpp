#include "doctest.h"

#include <cmath>

#include "opmean/errors.hpp"
#include "opmean/measure.hpp"

using namespace opmean;

TEST_CASE("dirac measures generate weighted harmonic interpolants") {
    GeneratorMeasure half = GeneratorMeasure::dirac(0.5);
    CHECK(half.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(half.center_of_mass() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half.eval_f(4.0) == doctest::Approx(1.6).epsilon(1e-14));  // 2x/(x+1) at 4
    CHECK(half.eval_f(1.0) == doctest::Approx(1.0).epsilon(1e-14));

    // Endpoint diracs generate the projections f = 1 and f = x.
    CHECK(GeneratorMeasure::dirac(0.0).eval_f(7.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(GeneratorMeasure::dirac(1.0).eval_f(7.0) == doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("endpoint atoms generate the weighted arithmetic generator") {
    GeneratorMeasure mu = GeneratorMeasure::endpoint_atoms(0.25);
    CHECK(mu.eval_f(3.0) == doctest::Approx(1.5).epsilon(1e-14));  // 0.75 + 0.25 x
    CHECK(mu.center_of_mass() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mu.mass_at(0.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(mu.mass_at(1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mu.mass_at(0.3) == 0.0);
    CHECK(mu.inf_f() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(std::isinf(mu.sup_f()));
}

TEST_CASE("eval_f_prime agrees with a finite difference") {
    GeneratorMeasure mu = GeneratorMeasure::from_atoms({{0.2, 0.3}, {0.7, 0.7}});
    for (double x : {0.3, 1.0, 2.5, 8.0}) {
        const double h = 1e-6 * x;
        const double fd = (mu.eval_f(x + h) - mu.eval_f(x - h)) / (2.0 * h);
        CHECK(mu.eval_f_prime(x) == doctest::Approx(fd).epsilon(1e-7));
    }
    // f'(1) equals the center of mass.
    CHECK(mu.eval_f_prime(1.0) == doctest::Approx(mu.center_of_mass()).epsilon(1e-12));
}

TEST_CASE("measure validation rejects malformed atoms") {
    CHECK_THROWS_AS(GeneratorMeasure::from_atoms({{1.2, 1.0}}), DomainError);
    CHECK_THROWS_AS(GeneratorMeasure::from_atoms({{-0.1, 1.0}}), DomainError);
    CHECK_THROWS_AS(GeneratorMeasure::from_atoms({{0.5, -1.0}}), DomainError);
    CHECK_THROWS_AS(GeneratorMeasure::from_atoms({{0.5, 0.9}}), DomainError);  // mass != 1
    CHECK_THROWS_AS(GeneratorMeasure::from_atoms({}), DomainError);
}

TEST_CASE("integrated call potentials have the textbook values") {
    GeneratorMeasure point = GeneratorMeasure::dirac(0.5);
    CHECK(integrated_call(point, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(integrated_call(point, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(integrated_call(point, 0.75) == doctest::Approx(0.0).epsilon(1e-14));

    GeneratorMeasure ends = GeneratorMeasure::endpoint_atoms(0.5);
    CHECK(integrated_call(ends, 0.25) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(integrated_call(ends, 0.25) >= integrated_call(point, 0.25));
}

TEST_CASE("convex order: dirac below endpoint pair, centers must match") {
    GeneratorMeasure point = GeneratorMeasure::dirac(0.5);
    GeneratorMeasure ends = GeneratorMeasure::endpoint_atoms(0.5);
    CHECK(convex_order_leq(point, ends));
    CHECK(!convex_order_leq(ends, point));

    GeneratorMeasure off = GeneratorMeasure::dirac(0.3);
    CHECK(!convex_order_leq(off, point));
    CHECK(!convex_order_leq(point, off));
    CHECK(convex_order_leq(point, point));  // reflexive
}

TEST_CASE("half-line pushforward lands on the unit interval with mass preserved") {
    HalfLineMeasure m = HalfLineMeasure::from_atoms({{0.0, 0.2}, {1.0, 0.3}, {3.0, 0.1}}, 0.4);
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    GeneratorMeasure mu = pushforward_to_unit(m);
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu.mass_at(0.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mu.mass_at(0.5) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(mu.mass_at(0.75) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(mu.mass_at(1.0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("jacobi power family reproduces x^p and survives flipping") {
    GeneratorMeasure mu = GeneratorMeasure::jacobi_power_family(0.5, 64);
    CHECK(mu.eval_f(4.0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(mu.center_of_mass() == doctest::Approx(0.5).epsilon(1e-10));
    REQUIRE(mu.density_spec().has_value());
    CHECK(mu.density_spec()->family == "jacobi");
    CHECK(mu.density_spec()->p == doctest::Approx(0.5));

    GeneratorMeasure flipped = GeneratorMeasure::jacobi_power_family(0.3, 48).flipped();
    REQUIRE(flipped.density_spec().has_value());
    CHECK(flipped.density_spec()->p == doctest::Approx(0.7));
    // The flip generates the transpose: f_flip(x) = x f(1/x).
    GeneratorMeasure base = GeneratorMeasure::jacobi_power_family(0.3, 48);
    for (double x : {0.4, 2.5, 9.0}) {
        CHECK(flipped.eval_f(x) == doctest::Approx(x * base.eval_f(1.0 / x)).epsilon(1e-10));
    }
}

TEST_CASE("uniform density generates x log x / (x-1)") {
    GeneratorMeasure mu = GeneratorMeasure::uniform_density(32);
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mu.center_of_mass() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mu.eval_f(4.0) == doctest::Approx(4.0 * std::log(4.0) / 3.0).epsilon(1e-10));
}

TEST_CASE("support points merge atoms and density nodes in order") {
    GeneratorMeasure mu = GeneratorMeasure::endpoint_atoms(0.5);
    std::vector<double> pts = mu.support_points();
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == 0.0);
    CHECK(pts[1] == 1.0);
}
