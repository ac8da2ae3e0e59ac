#pragma once

#include <vector>

namespace opmean {

/// Nodes and weights of a Gauss rule on the open unit interval (0, 1).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule: integrates h against the Lebesgue measure on (0, 1).
QuadratureRule gauss_legendre_unit(int n);

/// Gauss-Jacobi rule: integrates h against the weight (1-x)^alpha * x^beta on
/// (0, 1), alpha, beta > -1. Endpoint singularities live in the weight, so
/// analytic h converges geometrically.
QuadratureRule gauss_jacobi_unit(int n, double alpha, double beta);

} // namespace opmean
