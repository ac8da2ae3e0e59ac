#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opmean {

/// Outcome of one named verification suite. On failure, `detail` carries a
/// counterexample dump (the inputs and values that broke the property).
struct VerifyResult {
    std::string suite;
    bool pass = false;
    int checks = 0;
    std::string detail;
};

/// Names accepted by run_verify_suite, in canonical order.
std::vector<std::string> verify_suite_names();

/// Run one suite. Suites are deterministic for a fixed seed. Throws ParseError
/// for an unknown name.
///
///   ka-axioms       P1 monotonicity, P2 transformer inequality, P4 normalization
///                   across the named mean families
///   generator       adjoint/transpose involutions and the transpose weight identity
///   convex-order    convex-order monotonicity and the harmonic/arithmetic envelope
///   power-family    Gauss-Jacobi measure vs closed-form x^p generators
///   karcher         two-point reduction, residual certificate, congruence equivariance
///   bw              fixed-point residual, scalar closed form, two-point optimality
///   hellinger       stationarity certificate, perturbation and 1-D oracles
///   sigma           two-point reduction, geometric closed form, Riccati identity
///   gradients       analytic vs finite-difference derivatives for all loss kinds
///   consistency     solver agreement across different initializations
VerifyResult run_verify_suite(const std::string& name, std::uint64_t seed);

} // namespace opmean
