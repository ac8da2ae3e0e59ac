#include "doctest.h"

#include <cmath>

#include "opmean/errors.hpp"
#include "opmean/hermitian.hpp"

using namespace opmean;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double rel_err(const ComplexMatrix& got, const ComplexMatrix& want) {
    return (got - want).norm() / (1.0 + want.norm());
}

} // namespace

TEST_CASE("hermitian constructor symmetrizes and rejects gross asymmetry") {
    HermitianMatrix ok(mat2(1.0, Complex(0.3, 0.1), Complex(0.3, -0.1), 2.0));
    CHECK(ok.entries()(0, 1) == Complex(0.3, 0.1));

    // Tiny asymmetry is repaired to the Hermitian part.
    HermitianMatrix repaired(mat2(1.0, Complex(0.5 + 1e-12, 0.0), 0.5, 1.0));
    CHECK(std::abs(repaired.entries()(0, 1) - repaired.entries()(1, 0)) < 1e-11);

    CHECK_THROWS_AS(HermitianMatrix(mat2(1.0, 1.0, 0.0, 1.0)), DomainError);
}

TEST_CASE("spd constructor rejects indefinite and near-singular input") {
    RealVector bad(2);
    bad << 1.0, -1.0;
    CHECK_THROWS_AS(SpdMatrix(HermitianMatrix::diagonal(bad)), DomainError);

    RealVector nearly(2);
    nearly << 1.0, 1e-12;
    CHECK_THROWS_AS(SpdMatrix(HermitianMatrix::diagonal(nearly)), DomainError);

    RealVector fine(2);
    fine << 1.0, 1e-6;
    CHECK_NOTHROW(SpdMatrix(HermitianMatrix::diagonal(fine)));
}

TEST_CASE("spectral calculus on diagonal matrices matches scalar closed forms") {
    RealVector d(2);
    d << 2.0, 0.5;
    SpdMatrix x = SpdMatrix::diagonal(d);
    SpdMatrix inv = spd_inverse(x);
    CHECK(inv.entries()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inv.entries()(1, 1).real() == doctest::Approx(2.0).epsilon(1e-14));

    RealVector d49(2);
    d49 << 4.0, 9.0;
    SpdMatrix root = spd_power(SpdMatrix::diagonal(d49), 0.5);
    CHECK(root.entries()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(root.entries()(1, 1).real() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("spd_sqrt of the 2x2 ones-coupled matrix matches the frozen oracle") {
    SpdMatrix x(mat2(2.0, 1.0, 1.0, 2.0));
    SpdMatrix root = spd_sqrt(x);
    // Eigenvalues 1 and 3; sqrt has entries (sqrt(3)+1)/2 and (sqrt(3)-1)/2.
    CHECK(root.entries()(0, 0).real() == doctest::Approx(1.3660254037844386).epsilon(1e-13));
    CHECK(root.entries()(0, 1).real() == doctest::Approx(0.36602540378443865).epsilon(1e-13));
    CHECK(rel_err(ComplexMatrix(root.entries() * root.entries()), x.entries()) < 1e-13);
}

TEST_CASE("complex spd round trips through sqrt, log and exp") {
    SpdMatrix x(mat2(2.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0));  // eigenvalues 1, 3
    CHECK(x.min_eigenvalue() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x.max_eigenvalue() == doctest::Approx(3.0).epsilon(1e-12));

    SpdMatrix root = spd_sqrt(x);
    CHECK(rel_err(ComplexMatrix(root.entries() * root.entries()), x.entries()) < 1e-13);

    SpdMatrix back = spd_exp(spd_log(x));
    CHECK(rel_err(back.entries(), x.entries()) < 1e-13);
}

TEST_CASE("matrix_function reports the offending eigenvalue") {
    RealVector d(2);
    d << 2.0, 3.0;
    SpdMatrix x = SpdMatrix::diagonal(d);
    CHECK_NOTHROW(matrix_function(x, [](double t) { return t; }, "id"));
    CHECK_THROWS_AS(matrix_function(x, [](double t) { return std::log(t - 5.0); }, "shifted-log"),
                    DomainError);
}

TEST_CASE("operator_abs flips negative spectrum") {
    ComplexMatrix z = mat2(3.0, 0.0, 0.0, -4.0);
    HermitianMatrix a = operator_abs(z);
    CHECK(a.entries()(0, 0).real() == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(a.entries()(1, 1).real() == doctest::Approx(4.0).epsilon(1e-13));

    // Nilpotent block: |Z| = diag(0, 2) for Z = [[0,2],[0,0]].
    HermitianMatrix n = operator_abs(mat2(0.0, 2.0, 0.0, 0.0));
    CHECK(n.entries()(0, 0).real() == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(n.entries()(1, 1).real() == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("congruence computes C X C* and rejects singular C") {
    SpdMatrix x = SpdMatrix::identity(2);
    ComplexMatrix c = mat2(2.0, 0.0, 0.0, 3.0);
    SpdMatrix y = congruence(c, x);
    CHECK(y.entries()(0, 0).real() == doctest::Approx(4.0));
    CHECK(y.entries()(1, 1).real() == doctest::Approx(9.0));

    CHECK_THROWS_AS(congruence(mat2(1.0, 0.0, 0.0, 0.0), x), DomainError);
}

TEST_CASE("loewner_leq orders commuting diagonals correctly") {
    RealVector lo(2), hi(2), cross(2);
    lo << 1.0, 1.0;
    hi << 2.0, 2.0;
    cross << 2.0, 0.5;
    CHECK(loewner_leq(SpdMatrix::diagonal(lo), SpdMatrix::diagonal(hi)));
    CHECK(!loewner_leq(SpdMatrix::diagonal(hi), SpdMatrix::diagonal(lo)));
    CHECK(!loewner_leq(SpdMatrix::diagonal(cross), SpdMatrix::diagonal(lo)));
    CHECK(!loewner_leq(SpdMatrix::diagonal(lo), SpdMatrix::diagonal(cross)));
}

TEST_CASE("eigen_decompose reconstructs with a unitary basis and sorted spectrum") {
    SpdMatrix x = random_spd(5, 100.0, 424242);
    const EigenDecomposition& spec = x.spectrum();
    ComplexMatrix rebuilt =
        spec.vectors * spec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
        spec.vectors.adjoint();
    CHECK(rel_err(rebuilt, x.entries()) < 1e-12);
    CHECK((spec.vectors.adjoint() * spec.vectors - ComplexMatrix::Identity(5, 5)).norm() < 1e-12);
    for (Eigen::Index i = 1; i < 5; ++i) CHECK(spec.eigenvalues(i) >= spec.eigenvalues(i - 1));
}

TEST_CASE("random_spd is deterministic per seed with bounded condition number") {
    SpdMatrix a = random_spd(4, 50.0, 7);
    SpdMatrix b = random_spd(4, 50.0, 7);
    SpdMatrix c = random_spd(4, 50.0, 8);
    CHECK((a.entries() - b.entries()).norm() == 0.0);
    CHECK((a.entries() - c.entries()).norm() > 0.0);
    CHECK(a.condition_number() <= 50.0 * (1.0 + 1e-9));
    CHECK(a.condition_number() >= 1.0);
    CHECK(a.max_eigenvalue() <= 1.0 + 1e-12);

    CHECK_THROWS_AS(random_spd(0, 10.0, 1), DomainError);
    CHECK_THROWS_AS(random_spd(3, 0.5, 1), DomainError);
}

TEST_CASE("deterministic rng reproduces its stream and has sane moments") {
    DeterministicRng a(123);
    DeterministicRng b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_uniform() == b.next_uniform());

    DeterministicRng r(99);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double g = r.next_gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.05));

    DeterministicRng u(5);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.next_uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("random_hermitian_direction is unit-norm Hermitian") {
    HermitianMatrix h = random_hermitian_direction(4, 31);
    CHECK(h.frobenius_norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((h.entries() - h.entries().adjoint()).norm() < 1e-14);
    HermitianMatrix h2 = random_hermitian_direction(4, 31);
    CHECK((h.entries() - h2.entries()).norm() == 0.0);
}
