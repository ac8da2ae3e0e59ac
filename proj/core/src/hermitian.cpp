#include "opmean/hermitian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace opmean {

namespace {

std::string dim_mismatch(Eigen::Index a, Eigen::Index b) {
    std::ostringstream os;
    os << "dimension mismatch: " << a << " vs " << b;
    return os.str();
}

ComplexMatrix symmetrized(const ComplexMatrix& x) { return 0.5 * (x + x.adjoint()); }

} // namespace

HermitianMatrix::HermitianMatrix(ComplexMatrix raw) {
    if (raw.rows() != raw.cols()) {
        throw DomainError("HermitianMatrix: input is not square");
    }
    const double scale = raw.norm();
    const double asymmetry = (raw - raw.adjoint()).norm() / 2.0;
    if (asymmetry > kSymmetrizeTol * scale && scale > 0.0) {
        std::ostringstream os;
        os << "HermitianMatrix: asymmetry " << asymmetry << " exceeds " << kSymmetrizeTol
           << " * ||X|| = " << kSymmetrizeTol * scale;
        throw DomainError(os.str());
    }
    entries_ = symmetrized(raw);
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
    return HermitianMatrix(ComplexMatrix::Identity(dim, dim), AlreadyHermitian{});
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
    return HermitianMatrix(ComplexMatrix::Zero(dim, dim), AlreadyHermitian{});
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& entries) {
    ComplexMatrix m = ComplexMatrix::Zero(entries.size(), entries.size());
    for (Eigen::Index i = 0; i < entries.size(); ++i) m(i, i) = entries(i);
    return HermitianMatrix(std::move(m), AlreadyHermitian{});
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
    if (dim() != other.dim()) throw DomainError(dim_mismatch(dim(), other.dim()));
    return HermitianMatrix(entries_ + other.entries_, AlreadyHermitian{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
    if (dim() != other.dim()) throw DomainError(dim_mismatch(dim(), other.dim()));
    return HermitianMatrix(entries_ - other.entries_, AlreadyHermitian{});
}

HermitianMatrix HermitianMatrix::operator*(double scale) const {
    return HermitianMatrix(scale * entries_, AlreadyHermitian{});
}

SpdMatrix::SpdMatrix(HermitianMatrix base) : base_(std::move(base)) {
    auto decomp = std::make_shared<EigenDecomposition>(eigen_decompose(base_));
    const double lo = decomp->eigenvalues(0);
    const double hi = decomp->eigenvalues(decomp->eigenvalues.size() - 1);
    if (!(lo > kPdEpsilon * hi) || !(lo > 0.0)) {
        std::ostringstream os;
        os << "SpdMatrix: not positive definite (min eigenvalue " << lo << ", max " << hi << ")";
        throw DomainError(os.str());
    }
    spectrum_ = std::move(decomp);
}

SpdMatrix SpdMatrix::identity(Eigen::Index dim) { return SpdMatrix(HermitianMatrix::identity(dim)); }

SpdMatrix SpdMatrix::diagonal(const RealVector& eigenvalues) {
    return SpdMatrix(HermitianMatrix::diagonal(eigenvalues));
}

EigenDecomposition eigen_decompose(const HermitianMatrix& x) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(x.entries());
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigen_decompose: self-adjoint eigensolver did not converge");
    }
    return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix matrix_function(const SpdMatrix& x, const std::function<double(double)>& phi,
                                std::string_view phi_name) {
    const EigenDecomposition& spec = x.spectrum();
    RealVector mapped(spec.eigenvalues.size());
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
        const double value = phi(spec.eigenvalues(i));
        if (!std::isfinite(value)) {
            std::ostringstream os;
            os << phi_name << " is not finite at eigenvalue " << spec.eigenvalues(i);
            throw DomainError(os.str());
        }
        mapped(i) = value;
    }
    ComplexMatrix result =
        spec.vectors * mapped.asDiagonal() * spec.vectors.adjoint();
    return HermitianMatrix(std::move(result));
}

SpdMatrix spd_sqrt(const SpdMatrix& x) {
    return SpdMatrix(matrix_function(x, [](double t) { return std::sqrt(t); }, "sqrt"));
}

HermitianMatrix spd_log(const SpdMatrix& x) {
    return matrix_function(x, [](double t) { return std::log(t); }, "log");
}

SpdMatrix spd_power(const SpdMatrix& x, double p) {
    return SpdMatrix(matrix_function(x, [p](double t) { return std::pow(t, p); }, "power"));
}

SpdMatrix spd_inverse(const SpdMatrix& x) {
    return SpdMatrix(matrix_function(x, [](double t) { return 1.0 / t; }, "inverse"));
}

SpdMatrix spd_exp(const HermitianMatrix& x) {
    EigenDecomposition spec = eigen_decompose(x);
    RealVector mapped = spec.eigenvalues.array().exp().matrix();
    ComplexMatrix result = spec.vectors * mapped.asDiagonal() * spec.vectors.adjoint();
    return SpdMatrix(std::move(result));
}

HermitianMatrix congruence(const ComplexMatrix& c, const HermitianMatrix& x) {
    if (c.rows() != c.cols() || c.rows() != x.dim()) {
        throw DomainError("congruence: C must be square with the dimension of X");
    }
    Eigen::FullPivLU<ComplexMatrix> lu(c);
    if (!lu.isInvertible()) {
        throw DomainError("congruence: C is numerically singular");
    }
    return HermitianMatrix(c * x.entries() * c.adjoint());
}

SpdMatrix congruence(const ComplexMatrix& c, const SpdMatrix& x) {
    return SpdMatrix(congruence(c, x.hermitian()));
}

HermitianMatrix operator_abs(const ComplexMatrix& z) {
    if (z.rows() != z.cols()) throw DomainError("operator_abs: input is not square");
    HermitianMatrix gram(ComplexMatrix(z.adjoint() * z));
    EigenDecomposition spec = eigen_decompose(gram);
    RealVector mapped(spec.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i) {
        mapped(i) = std::sqrt(std::max(spec.eigenvalues(i), 0.0));  // clamp roundoff negatives
    }
    return HermitianMatrix(ComplexMatrix(spec.vectors * mapped.asDiagonal() * spec.vectors.adjoint()));
}

bool loewner_leq(const HermitianMatrix& x, const HermitianMatrix& y, double tol) {
    if (x.dim() != y.dim()) throw DomainError(dim_mismatch(x.dim(), y.dim()));
    HermitianMatrix gap = y - x;
    EigenDecomposition spec = eigen_decompose(gap);
    return spec.eigenvalues(0) >= -tol * (1.0 + gap.frobenius_norm());
}

bool loewner_leq(const SpdMatrix& x, const SpdMatrix& y, double tol) {
    return loewner_leq(x.hermitian(), y.hermitian(), tol);
}

double DeterministicRng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double DeterministicRng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

SpdMatrix random_spd(Eigen::Index dim, double condition_target, std::uint64_t seed) {
    if (dim < 1) throw DomainError("random_spd: dim must be >= 1");
    if (!(condition_target >= 1.0)) throw DomainError("random_spd: condition_target must be >= 1");
    DeterministicRng rng(seed);
    const double log_kappa = std::log(condition_target);
    RealVector eigenvalues(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        eigenvalues(i) = std::exp(-rng.next_uniform() * log_kappa);  // log-uniform in [1/kappa, 1]
    }
    ComplexMatrix ginibre(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double re = rng.next_gaussian();
            const double im = rng.next_gaussian();
            ginibre(i, j) = Complex(re, im) / std::sqrt(2.0);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix result = q * eigenvalues.asDiagonal() * q.adjoint();
    return SpdMatrix(std::move(result));
}

HermitianMatrix random_hermitian_direction(Eigen::Index dim, std::uint64_t seed) {
    DeterministicRng rng(seed);
    ComplexMatrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
        }
    }
    HermitianMatrix h((ComplexMatrix(0.5 * (g + g.adjoint()))));
    const double norm = h.frobenius_norm();
    if (norm == 0.0) return HermitianMatrix::identity(dim) * (1.0 / std::sqrt(double(dim)));
    return h * (1.0 / norm);
}

} // namespace opmean
