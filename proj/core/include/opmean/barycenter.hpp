#pragma once

#include <optional>
#include <vector>

#include "opmean/divergence.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

namespace opmean {

/// Same-dimension SPD matrices with strictly positive weights summing to 1.
class WeightedEnsemble {
  public:
    WeightedEnsemble(std::vector<SpdMatrix> matrices, std::vector<double> weights);

    /// Equal weights 1/m.
    static WeightedEnsemble equal_weights(std::vector<SpdMatrix> matrices);

    std::size_t size() const { return matrices_.size(); }
    Eigen::Index dim() const { return matrices_.front().dim(); }
    const std::vector<SpdMatrix>& matrices() const { return matrices_; }
    const std::vector<double>& weights() const { return weights_; }
    const SpdMatrix& matrix(std::size_t j) const { return matrices_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }

    SpdMatrix arithmetic_mean() const;
    SpdMatrix harmonic_mean() const;

  private:
    std::vector<SpdMatrix> matrices_;
    std::vector<double> weights_;
};

enum class InitStrategy { arithmetic, harmonic, ah_geometric, explicit_matrix };

struct SolverConfig {
    double tol = 1e-10;     // relative residual threshold
    int max_iter = 500;
    double damping = 1.0;   // halved on residual increase, floor 1/64
    InitStrategy init = InitStrategy::arithmetic;
    std::optional<SpdMatrix> init_matrix;  // required for explicit_matrix
};

struct SolverReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;
    double final_residual = 0.0;
    double objective = 0.0;
    double wall_time_sec = 0.0;  // not serialized
};

struct SolverResult {
    SpdMatrix solution;
    SolverReport report;
};

/// Loss selector shared by loss_Q, loss_gradient and gradient_check.
class LossSpec {
  public:
    static LossSpec rtm();
    static LossSpec bw();
    static LossSpec hellinger(GeneratorMeasure mu);
    static LossSpec sigma(MeanDescriptor descriptor);

    enum class Kind { rtm, bw, hellinger, sigma };
    Kind kind() const { return kind_; }
    const GeneratorMeasure& measure() const { return *measure_; }
    const SigmaPotential& potential() const { return *potential_; }

  private:
    Kind kind_ = Kind::rtm;
    std::optional<GeneratorMeasure> measure_;
    std::optional<SigmaPotential> potential_;
};

/// Weighted objective sum_j w_j d^2(A_j, X) (metric kinds) or
/// sum_j w_j phi(A_j, X) (divergence kinds); +infinity is a possible value
/// for the sigma kind.
double loss_Q(const LossSpec& loss, const WeightedEnsemble& ensemble, const SpdMatrix& x);

/// Gradient of loss_Q with respect to the Frobenius pairing Y -> tr(G Y).
HermitianMatrix loss_gradient(const LossSpec& loss, const WeightedEnsemble& ensemble, const SpdMatrix& x);

/// Worst relative disagreement between the analytic directional derivative
/// tr(G H) and the central finite difference of loss_Q along `num_directions`
/// random unit Hermitian directions.
double gradient_check(const LossSpec& loss, const WeightedEnsemble& ensemble, const SpdMatrix& x,
                      double step = 1e-5, int num_directions = 20, std::uint64_t seed = 20240901);

// Residual operators, exposed so convergence can be certified independently of
// the iteration that produced a solution.

/// sum_j w_j log(X^{1/2} A_j^{-1} X^{1/2}); zero exactly at the Karcher mean.
HermitianMatrix karcher_residual(const WeightedEnsemble& ensemble, const SpdMatrix& x);

/// sum_j w_j (X^{1/2} A_j X^{1/2})^{1/2}; the Bures-Wasserstein barycenter is
/// its fixed point.
HermitianMatrix bw_fixed_point_map(const WeightedEnsemble& ensemble, const SpdMatrix& x);

/// c(mu) I - sum_j w_j int lambda |(1-lambda) A_j^{-1} X + lambda I|^{-2} dmu;
/// vanishes exactly at the Hellinger barycenter.
HermitianMatrix hellinger_stationarity_residual(const GeneratorMeasure& mu,
                                                const WeightedEnsemble& ensemble, const SpdMatrix& x);

/// Picard map of the Hellinger fixed point equation
///   (1/c) sum_j w_j int lambda |(1-l) A_j^{-1} X^{1/2} + l X^{-1/2}|^{-2} dmu;
/// SPD by construction for any SPD input.
SpdMatrix hellinger_fixed_point_map(const GeneratorMeasure& mu, const WeightedEnsemble& ensemble,
                                    const SpdMatrix& x);

/// sum_j w_j A_j^{-1/2} (I - f^{-1}(A_j^{-1/2} X A_j^{-1/2})^{-1}) A_j^{-1/2};
/// the critical-point operator of the sigma-kind loss.
HermitianMatrix sigma_critical_residual(const MeanDescriptor& sigma, const WeightedEnsemble& ensemble,
                                        const SpdMatrix& x);

// Solvers. Non-convergence is reported (converged = false), never thrown;
// structurally degenerate inputs throw DegenerateError up front.

/// Karcher (RTM) barycenter by the damped exponential update
///   X <- X^{1/2} exp(-theta R(X)) X^{1/2}.
SolverResult karcher_mean(const WeightedEnsemble& ensemble, const SolverConfig& config = {});

/// Bures-Wasserstein barycenter by damped Picard iteration on the fixed point map.
SolverResult bw_barycenter(const WeightedEnsemble& ensemble, const SolverConfig& config = {});

/// Generalized quantum Hellinger barycenter by damped Picard iteration.
/// Requires mu not supported on {0,1} (those generate identically zero losses
/// or a vanishing weight parameter).
SolverResult hellinger_barycenter(const GeneratorMeasure& mu, const WeightedEnsemble& ensemble,
                                  const SolverConfig& config = {});

/// Barycenter for the divergence of a symmetric mean with surjective generator,
/// by damped Newton on the critical-point operator (finite-difference Hessian
/// action, conjugate-gradient inner solve capped at a fixed iteration count,
/// steepest-descent fallback on the loss).
SolverResult ka_barycenter(const MeanDescriptor& sigma, const WeightedEnsemble& ensemble,
                           const SolverConfig& config = {});

/// Closed form of the sigma = geometric barycenter: H # A with
/// H = (sum_j w_j A_j^{-1})^{-1} and A = sum_j w_j A_j. Solves the Riccati
/// equation X (sum w_j A_j^{-1}) X = sum w_j A_j.
SpdMatrix geometric_barycenter_closed_form(const WeightedEnsemble& ensemble);

/// Two-point geometric mean A # B (the t = 1/2 RTM geodesic point).
SpdMatrix geometric_mean_two(const SpdMatrix& a, const SpdMatrix& b);

} // namespace opmean
