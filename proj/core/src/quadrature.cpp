#include "opmean/quadrature.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "opmean/errors.hpp"

namespace opmean {

namespace {

// Gauss rule for the Jacobi weight (1-x)^alpha (1+x)^beta on (-1, 1) via the
// Golub-Welsch tridiagonal eigenproblem built from the three-term recurrence
// coefficients of the monic Jacobi polynomials.
QuadratureRule gauss_jacobi_reference(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("quadrature: order must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0)) {
        throw DomainError("quadrature: Jacobi exponents must exceed -1");
    }
    const double ab = alpha + beta;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd subdiag = Eigen::VectorXd::Zero(n > 1 ? n - 1 : 1);

    diag(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double two_k = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (two_k * (two_k + 2.0));
    }
    if (n > 1) {
        double b1 = 4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        subdiag(0) = std::sqrt(b1);
    }
    for (int k = 2; k < n; ++k) {
        const double two_k = 2.0 * k + ab;
        const double bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                          (two_k * two_k * (two_k + 1.0) * (two_k - 1.0));
        subdiag(k - 1) = std::sqrt(bk);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag.head(std::max(n - 1, 0)),
                                  Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("quadrature: tridiagonal eigensolver did not converge");
    }

    // mu0 = integral of the weight over (-1, 1) = 2^(a+b+1) B(a+1, b+1).
    const double log_mu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                           std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0);
    const double mu0 = std::exp(log_mu0);

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = solver.eigenvalues()(k);
        const double first = std::abs(solver.eigenvectors()(0, k));
        rule.weights[k] = mu0 * first * first;
    }
    return rule;
}

} // namespace

QuadratureRule gauss_jacobi_unit(int n, double alpha, double beta) {
    QuadratureRule reference = gauss_jacobi_reference(n, alpha, beta);
    // Map x in (-1, 1) to lambda = (1+x)/2 in (0, 1); the weight transforms as
    // (1-x)^a (1+x)^b dx = 2^(a+b+1) (1-l)^a l^b dl, so divide by that factor.
    const double scale = std::pow(2.0, -(alpha + beta + 1.0));
    for (int k = 0; k < n; ++k) {
        reference.nodes[k] = 0.5 * (1.0 + reference.nodes[k]);
        reference.weights[k] *= scale;
    }
    return reference;
}

QuadratureRule gauss_legendre_unit(int n) { return gauss_jacobi_unit(n, 0.0, 0.0); }

} // namespace opmean
