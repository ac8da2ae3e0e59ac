#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string_view>

#include <Eigen/Dense>

#include "opmean/errors.hpp"

namespace opmean {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kSymmetrizeTol = 1e-8;  // relative asymmetry repaired silently below this
inline constexpr double kPdEpsilon = 1e-10;     // min(lambda) > eps * max(lambda) for SPD

/// Spectral factorization X = Q diag(lambda) Q* with lambda ascending and Q unitary.
struct EigenDecomposition {
    RealVector eigenvalues;
    ComplexMatrix vectors;
};

/// Dense complex Hermitian matrix. The constructor symmetrizes (X+X*)/2 and
/// rejects inputs whose asymmetry exceeds kSymmetrizeTol * ||X||_F.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(ComplexMatrix raw);

    static HermitianMatrix identity(Eigen::Index dim);
    static HermitianMatrix zero(Eigen::Index dim);
    static HermitianMatrix diagonal(const RealVector& entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const ComplexMatrix& entries() const { return entries_; }

    double frobenius_norm() const { return entries_.norm(); }
    double trace() const { return entries_.trace().real(); }

    HermitianMatrix operator+(const HermitianMatrix& other) const;
    HermitianMatrix operator-(const HermitianMatrix& other) const;
    HermitianMatrix operator*(double scale) const;
    HermitianMatrix operator-() const { return *this * -1.0; }

  private:
    struct AlreadyHermitian {};
    HermitianMatrix(ComplexMatrix entries, AlreadyHermitian) : entries_(std::move(entries)) {}

    ComplexMatrix entries_;
};

inline HermitianMatrix operator*(double scale, const HermitianMatrix& x) { return x * scale; }

/// Positive definite Hermitian matrix. The constructor eigendecomposes the
/// input (the decomposition is kept as a spectral cache) and rejects matrices
/// with min(lambda) <= kPdEpsilon * max(lambda).
class SpdMatrix {
  public:
    explicit SpdMatrix(HermitianMatrix base);
    explicit SpdMatrix(ComplexMatrix raw) : SpdMatrix(HermitianMatrix(std::move(raw))) {}

    static SpdMatrix identity(Eigen::Index dim);
    static SpdMatrix diagonal(const RealVector& eigenvalues);

    Eigen::Index dim() const { return base_.dim(); }
    const HermitianMatrix& hermitian() const { return base_; }
    const ComplexMatrix& entries() const { return base_.entries(); }
    const EigenDecomposition& spectrum() const { return *spectrum_; }

    double min_eigenvalue() const { return spectrum_->eigenvalues(0); }
    double max_eigenvalue() const { return spectrum_->eigenvalues(spectrum_->eigenvalues.size() - 1); }
    double condition_number() const { return max_eigenvalue() / min_eigenvalue(); }
    double frobenius_norm() const { return base_.frobenius_norm(); }
    double trace() const { return base_.trace(); }

  private:
    HermitianMatrix base_;
    std::shared_ptr<const EigenDecomposition> spectrum_;  // immutable, shared on copy
};

/// Full Hermitian eigendecomposition (ascending eigenvalues, unitary Q).
EigenDecomposition eigen_decompose(const HermitianMatrix& x);

/// Spectral calculus: Q phi(Lambda) Q*. Throws DomainError naming the offending
/// eigenvalue when phi is non-finite there. `phi_name` is used in diagnostics.
HermitianMatrix matrix_function(const SpdMatrix& x, const std::function<double(double)>& phi,
                                std::string_view phi_name = "phi");

SpdMatrix spd_sqrt(const SpdMatrix& x);
HermitianMatrix spd_log(const SpdMatrix& x);
SpdMatrix spd_power(const SpdMatrix& x, double p);
SpdMatrix spd_inverse(const SpdMatrix& x);
SpdMatrix spd_exp(const HermitianMatrix& x);

/// C X C* for invertible C (throws on numerically singular C).
HermitianMatrix congruence(const ComplexMatrix& c, const HermitianMatrix& x);
SpdMatrix congruence(const ComplexMatrix& c, const SpdMatrix& x);

/// Operator absolute value |Z| = (Z* Z)^{1/2}; positive semidefinite in general.
HermitianMatrix operator_abs(const ComplexMatrix& z);

/// Loewner order test: true iff min eig(Y - X) >= -tol * (1 + ||Y - X||_F).
bool loewner_leq(const HermitianMatrix& x, const HermitianMatrix& y, double tol = 1e-9);
bool loewner_leq(const SpdMatrix& x, const SpdMatrix& y, double tol = 1e-9);

/// Reproducible random SPD matrix: eigenvalues log-uniform in
/// [1/condition_target, 1], eigenvectors from a unitarized complex Gaussian.
/// Identical output for identical (dim, condition_target, seed) on every platform.
SpdMatrix random_spd(Eigen::Index dim, double condition_target, std::uint64_t seed);

/// Random Hermitian direction with unit Frobenius norm (test probes, perturbations).
HermitianMatrix random_hermitian_direction(Eigen::Index dim, std::uint64_t seed);

/// Deterministic stream of doubles/gaussians built on raw mt19937_64 output.
/// The engine is fully specified by the standard; the uniform and Box-Muller
/// transforms are our own, so identical seeds give identical streams on every
/// platform (std::*_distribution makes no such promise).
class DeterministicRng {
  public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next_u64() { return engine_(); }
    double next_uniform();   // [0, 1)
    double next_gaussian();  // standard normal via Box-Muller
  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace opmean
