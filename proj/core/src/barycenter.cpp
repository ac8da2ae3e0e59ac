#include "opmean/barycenter.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace opmean {

namespace {

constexpr double kDampingFloor = 1.0 / 64.0;

double herm_ip(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.adjoint() * b).trace().real();
}

void validate_config(const SolverConfig& config) {
    if (!(config.tol > 0.0) || !std::isfinite(config.tol)) {
        throw DomainError("solver config: tol must be positive and finite");
    }
    if (config.max_iter < 1) throw DomainError("solver config: max_iter must be >= 1");
    if (!(config.damping > 0.0 && config.damping <= 1.0)) {
        throw DomainError("solver config: damping must lie in (0, 1]");
    }
}

SpdMatrix initial_point(const WeightedEnsemble& ensemble, const SolverConfig& config) {
    switch (config.init) {
        case InitStrategy::arithmetic:
            return ensemble.arithmetic_mean();
        case InitStrategy::harmonic:
            return ensemble.harmonic_mean();
        case InitStrategy::ah_geometric:
            return geometric_mean_two(ensemble.harmonic_mean(), ensemble.arithmetic_mean());
        case InitStrategy::explicit_matrix:
            if (!config.init_matrix) {
                throw DomainError("solver config: explicit_matrix init requires init_matrix");
            }
            if (config.init_matrix->dim() != ensemble.dim()) {
                throw DomainError("solver config: init_matrix dimension mismatch");
            }
            return *config.init_matrix;
    }
    throw DomainError("solver config: unknown init strategy");
}

std::optional<SpdMatrix> try_spd(const ComplexMatrix& candidate) {
    try {
        return SpdMatrix(HermitianMatrix(candidate));
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

double inverse_frobenius_norm(const SpdMatrix& x) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.dim(); ++i) {
        const double lam = x.spectrum().eigenvalues(i);
        sum += 1.0 / (lam * lam);
    }
    return std::sqrt(sum);
}

void require_same_dim(const WeightedEnsemble& ensemble, const SpdMatrix& x, const char* what) {
    if (ensemble.dim() != x.dim()) {
        std::ostringstream os;
        os << what << ": point dimension " << x.dim() << " does not match ensemble dimension "
           << ensemble.dim();
        throw DomainError(os.str());
    }
}

// Shared Hellinger kernel: P(X) = sum_j w_j int lambda S^{-1} A_j^2 S^{-1} dmu
// with S = (1-lambda) X + lambda A_j. The stationarity residual is
// c I - P(X) and the Picard map is (1/c) X^{1/2} P(X) X^{1/2}.
HermitianMatrix hellinger_accumulate(const GeneratorMeasure& mu, const WeightedEnsemble& ensemble,
                                     const SpdMatrix& x) {
    require_same_dim(ensemble, x, "hellinger");
    const Eigen::Index n = x.dim();
    ComplexMatrix total = ComplexMatrix::Zero(n, n);
    auto add_portion = [&](const WeightedAtom& node) {
        if (node.location == 0.0) return;  // lambda factor annihilates the term
        for (std::size_t j = 0; j < ensemble.size(); ++j) {
            const ComplexMatrix& aj = ensemble.matrix(j).entries();
            ComplexMatrix s = (1.0 - node.location) * x.entries() + node.location * aj;
            Eigen::LLT<ComplexMatrix> llt(s);
            if (llt.info() != Eigen::Success) {
                throw NumericalError("hellinger: interpolation matrix is not positive definite");
            }
            ComplexMatrix t = llt.solve(aj);  // S^{-1} A_j, so T T* = S^{-1} A_j^2 S^{-1}
            total += (ensemble.weight(j) * node.location * node.mass) * (t * t.adjoint());
        }
    };
    for (const WeightedAtom& a : mu.atoms()) add_portion(a);
    for (const WeightedAtom& a : mu.density_nodes()) add_portion(a);
    return HermitianMatrix(std::move(total));
}

bool measure_is_degenerate(const GeneratorMeasure& mu) {
    for (double loc : mu.support_points()) {
        if (loc != 0.0 && loc != 1.0) return false;
    }
    return true;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

} // namespace

WeightedEnsemble::WeightedEnsemble(std::vector<SpdMatrix> matrices, std::vector<double> weights)
    : matrices_(std::move(matrices)), weights_(std::move(weights)) {
    if (matrices_.empty()) throw DomainError("WeightedEnsemble: no matrices");
    if (weights_.size() != matrices_.size()) {
        throw DomainError("WeightedEnsemble: weight count does not match matrix count");
    }
    const Eigen::Index n = matrices_.front().dim();
    double total = 0.0;
    for (std::size_t j = 0; j < matrices_.size(); ++j) {
        if (matrices_[j].dim() != n) {
            throw DomainError("WeightedEnsemble: matrices have mixed dimensions");
        }
        if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j])) {
            throw DomainError("WeightedEnsemble: weights must be positive and finite");
        }
        total += weights_[j];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "WeightedEnsemble: weights sum to " << total << ", not 1";
        throw DomainError(os.str());
    }
}

WeightedEnsemble WeightedEnsemble::equal_weights(std::vector<SpdMatrix> matrices) {
    std::vector<double> weights(matrices.size(), matrices.empty() ? 1.0 : 1.0 / matrices.size());
    return WeightedEnsemble(std::move(matrices), std::move(weights));
}

SpdMatrix WeightedEnsemble::arithmetic_mean() const {
    ComplexMatrix acc = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t j = 0; j < size(); ++j) acc += weights_[j] * matrices_[j].entries();
    return SpdMatrix(std::move(acc));
}

SpdMatrix WeightedEnsemble::harmonic_mean() const {
    ComplexMatrix acc = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t j = 0; j < size(); ++j) {
        acc += weights_[j] * spd_inverse(matrices_[j]).entries();
    }
    return spd_inverse(SpdMatrix(std::move(acc)));
}

LossSpec LossSpec::rtm() {
    LossSpec s;
    s.kind_ = Kind::rtm;
    return s;
}

LossSpec LossSpec::bw() {
    LossSpec s;
    s.kind_ = Kind::bw;
    return s;
}

LossSpec LossSpec::hellinger(GeneratorMeasure mu) {
    LossSpec s;
    s.kind_ = Kind::hellinger;
    s.measure_ = std::move(mu);
    return s;
}

LossSpec LossSpec::sigma(MeanDescriptor descriptor) {
    LossSpec s;
    s.kind_ = Kind::sigma;
    s.potential_.emplace(std::move(descriptor));
    return s;
}

double loss_Q(const LossSpec& loss, const WeightedEnsemble& ensemble, const SpdMatrix& x) {
    require_same_dim(ensemble, x, "loss_Q");
    double total = 0.0;
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        const SpdMatrix& aj = ensemble.matrix(j);
        const double w = ensemble.weight(j);
        switch (loss.kind()) {
            case LossSpec::Kind::rtm: {
                const double d = d_rtm(aj, x);
                total += w * d * d;
                break;
            }
            case LossSpec::Kind::bw: {
                const double d = d_bw(aj, x);
                total += w * d * d;
                break;
            }
            case LossSpec::Kind::hellinger:
                total += w * phi_mu(loss.measure(), aj, x);
                break;
            case LossSpec::Kind::sigma:
                total += w * phi_sigma(loss.potential(), aj, x);
                break;
        }
        if (std::isinf(total)) return total;
    }
    return total;
}

HermitianMatrix loss_gradient(const LossSpec& loss, const WeightedEnsemble& ensemble,
                              const SpdMatrix& x) {
    require_same_dim(ensemble, x, "loss_gradient");
    switch (loss.kind()) {
        case LossSpec::Kind::rtm: {
            SpdMatrix root = spd_sqrt(x);
            SpdMatrix inv_root = spd_inverse(root);
            ComplexMatrix acc = ComplexMatrix::Zero(x.dim(), x.dim());
            for (std::size_t j = 0; j < ensemble.size(); ++j) {
                SpdMatrix inner = congruence(root.entries(), spd_inverse(ensemble.matrix(j)));
                acc += (2.0 * ensemble.weight(j)) *
                       congruence(inv_root.entries(), spd_log(inner)).entries();
            }
            return HermitianMatrix(std::move(acc));
        }
        case LossSpec::Kind::bw: {
            ComplexMatrix acc = ComplexMatrix::Zero(x.dim(), x.dim());
            for (std::size_t j = 0; j < ensemble.size(); ++j) {
                SpdMatrix root = spd_sqrt(ensemble.matrix(j));
                SpdMatrix inner = congruence(root.entries(), x);
                HermitianMatrix transport =
                    congruence(root.entries(), spd_power(inner, -0.5).hermitian());
                acc += ensemble.weight(j) *
                       (ComplexMatrix::Identity(x.dim(), x.dim()) - transport.entries());
            }
            return HermitianMatrix(std::move(acc));
        }
        case LossSpec::Kind::hellinger:
            return hellinger_stationarity_residual(loss.measure(), ensemble, x);
        case LossSpec::Kind::sigma:
            return sigma_critical_residual(loss.potential().descriptor(), ensemble, x);
    }
    throw DomainError("loss_gradient: unknown loss kind");
}

double gradient_check(const LossSpec& loss, const WeightedEnsemble& ensemble, const SpdMatrix& x,
                      double step, int num_directions, std::uint64_t seed) {
    if (!(step > 0.0)) throw DomainError("gradient_check: step must be positive");
    HermitianMatrix grad = loss_gradient(loss, ensemble, x);
    double worst = 0.0;
    for (int i = 0; i < num_directions; ++i) {
        HermitianMatrix h = random_hermitian_direction(x.dim(), seed + std::uint64_t(i));
        const double analytic = herm_ip(grad.entries(), h.entries());
        SpdMatrix forward(ComplexMatrix(x.entries() + step * h.entries()));
        SpdMatrix backward(ComplexMatrix(x.entries() - step * h.entries()));
        const double fd =
            (loss_Q(loss, ensemble, forward) - loss_Q(loss, ensemble, backward)) / (2.0 * step);
        const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-3});
        worst = std::max(worst, std::abs(analytic - fd) / scale);
    }
    return worst;
}

HermitianMatrix karcher_residual(const WeightedEnsemble& ensemble, const SpdMatrix& x) {
    require_same_dim(ensemble, x, "karcher_residual");
    SpdMatrix root = spd_sqrt(x);
    ComplexMatrix acc = ComplexMatrix::Zero(x.dim(), x.dim());
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        SpdMatrix inner = congruence(root.entries(), spd_inverse(ensemble.matrix(j)));
        acc += ensemble.weight(j) * spd_log(inner).entries();
    }
    return HermitianMatrix(std::move(acc));
}

HermitianMatrix bw_fixed_point_map(const WeightedEnsemble& ensemble, const SpdMatrix& x) {
    require_same_dim(ensemble, x, "bw_fixed_point_map");
    SpdMatrix root = spd_sqrt(x);
    ComplexMatrix acc = ComplexMatrix::Zero(x.dim(), x.dim());
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        acc += ensemble.weight(j) *
               spd_sqrt(congruence(root.entries(), ensemble.matrix(j))).entries();
    }
    return HermitianMatrix(std::move(acc));
}

HermitianMatrix hellinger_stationarity_residual(const GeneratorMeasure& mu,
                                                const WeightedEnsemble& ensemble,
                                                const SpdMatrix& x) {
    const double c = mu.center_of_mass();
    HermitianMatrix p = hellinger_accumulate(mu, ensemble, x);
    return HermitianMatrix::identity(x.dim()) * c - p;
}

SpdMatrix hellinger_fixed_point_map(const GeneratorMeasure& mu, const WeightedEnsemble& ensemble,
                                    const SpdMatrix& x) {
    const double c = mu.center_of_mass();
    if (!(c > 0.0)) throw DegenerateError("hellinger: measure has center of mass 0");
    HermitianMatrix p = hellinger_accumulate(mu, ensemble, x);
    SpdMatrix root = spd_sqrt(x);
    return congruence(root.entries(), SpdMatrix(p * (1.0 / c)));
}

HermitianMatrix sigma_critical_residual(const MeanDescriptor& sigma,
                                        const WeightedEnsemble& ensemble, const SpdMatrix& x) {
    require_same_dim(ensemble, x, "sigma_critical_residual");
    ComplexMatrix acc = ComplexMatrix::Zero(x.dim(), x.dim());
    auto weight_map = [&sigma](double t) { return 1.0 - 1.0 / sigma.f_inverse(t); };
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        SpdMatrix inv_root = spd_inverse(spd_sqrt(ensemble.matrix(j)));
        SpdMatrix ratio = congruence(inv_root.entries(), x);
        HermitianMatrix mapped = matrix_function(ratio, weight_map, "sigma-critical");
        acc += ensemble.weight(j) * congruence(inv_root.entries(), mapped).entries();
    }
    return HermitianMatrix(std::move(acc));
}

SolverResult karcher_mean(const WeightedEnsemble& ensemble, const SolverConfig& config) {
    validate_config(config);
    Stopwatch watch;
    SpdMatrix x = initial_point(ensemble, config);
    auto threshold = [&config](const SpdMatrix& y) {
        return config.tol * (1.0 + y.frobenius_norm());
    };
    SolverReport report;
    HermitianMatrix residual = karcher_residual(ensemble, x);
    double res = residual.frobenius_norm();
    report.residual_history.push_back(res);
    bool converged = res <= threshold(x);
    double theta = config.damping;
    int iter = 0;
    while (!converged && iter < config.max_iter) {
        while (true) {
            SpdMatrix root = spd_sqrt(x);
            SpdMatrix candidate = congruence(root.entries(), spd_exp(residual * (-theta)));
            HermitianMatrix cand_residual = karcher_residual(ensemble, candidate);
            const double cand_res = cand_residual.frobenius_norm();
            if (cand_res <= res || theta <= kDampingFloor * (1.0 + 1e-9)) {
                x = std::move(candidate);
                residual = std::move(cand_residual);
                res = cand_res;
                break;
            }
            theta = std::max(0.5 * theta, kDampingFloor);
        }
        report.residual_history.push_back(res);
        ++iter;
        converged = res <= threshold(x);
    }
    report.converged = converged;
    report.iterations = iter;
    report.final_residual = res;
    report.objective = loss_Q(LossSpec::rtm(), ensemble, x);
    report.wall_time_sec = watch.seconds();
    return SolverResult{std::move(x), std::move(report)};
}

SolverResult bw_barycenter(const WeightedEnsemble& ensemble, const SolverConfig& config) {
    validate_config(config);
    Stopwatch watch;
    SpdMatrix x = initial_point(ensemble, config);
    auto threshold = [&config](const SpdMatrix& y) {
        return config.tol * (1.0 + y.frobenius_norm());
    };
    SolverReport report;
    HermitianMatrix mapped = bw_fixed_point_map(ensemble, x);
    double res = (mapped - x.hermitian()).frobenius_norm();
    report.residual_history.push_back(res);
    bool converged = res <= threshold(x);
    double theta = config.damping;
    int iter = 0;
    while (!converged && iter < config.max_iter) {
        while (true) {
            SpdMatrix candidate(x.hermitian() * (1.0 - theta) + mapped * theta);
            HermitianMatrix cand_mapped = bw_fixed_point_map(ensemble, candidate);
            const double cand_res = (cand_mapped - candidate.hermitian()).frobenius_norm();
            if (cand_res <= res || theta <= kDampingFloor * (1.0 + 1e-9)) {
                x = std::move(candidate);
                mapped = std::move(cand_mapped);
                res = cand_res;
                break;
            }
            theta = std::max(0.5 * theta, kDampingFloor);
        }
        report.residual_history.push_back(res);
        ++iter;
        converged = res <= threshold(x);
    }
    report.converged = converged;
    report.iterations = iter;
    report.final_residual = res;
    report.objective = loss_Q(LossSpec::bw(), ensemble, x);
    report.wall_time_sec = watch.seconds();
    return SolverResult{std::move(x), std::move(report)};
}

SolverResult hellinger_barycenter(const GeneratorMeasure& mu, const WeightedEnsemble& ensemble,
                                  const SolverConfig& config) {
    validate_config(config);
    if (measure_is_degenerate(mu)) {
        throw DegenerateError(
            "hellinger_barycenter: measure supported on {0,1} generates a degenerate divergence");
    }
    Stopwatch watch;
    const double c = mu.center_of_mass();
    SpdMatrix x = initial_point(ensemble, config);
    auto threshold = [&config](const SpdMatrix& y) {
        return config.tol * (1.0 + y.frobenius_norm());
    };
    // One kernel evaluation per candidate serves both the stationarity residual
    // c I - P and the Picard update (1/c) X^{1/2} P X^{1/2}.
    auto evaluate = [&](const SpdMatrix& y) {
        HermitianMatrix p = hellinger_accumulate(mu, ensemble, y);
        HermitianMatrix stationarity = HermitianMatrix::identity(y.dim()) * c - p;
        SpdMatrix image = congruence(spd_sqrt(y).entries(), SpdMatrix(p * (1.0 / c)));
        return std::pair<double, SpdMatrix>(stationarity.frobenius_norm(), std::move(image));
    };
    SolverReport report;
    auto [res, image] = evaluate(x);
    report.residual_history.push_back(res);
    bool converged = res <= threshold(x);
    double theta = config.damping;
    int iter = 0;
    while (!converged && iter < config.max_iter) {
        while (true) {
            SpdMatrix candidate(x.hermitian() * (1.0 - theta) + image.hermitian() * theta);
            auto [cand_res, cand_image] = evaluate(candidate);
            if (cand_res <= res || theta <= kDampingFloor * (1.0 + 1e-9)) {
                x = std::move(candidate);
                image = std::move(cand_image);
                res = cand_res;
                break;
            }
            theta = std::max(0.5 * theta, kDampingFloor);
        }
        report.residual_history.push_back(res);
        ++iter;
        converged = res <= threshold(x);
    }
    report.converged = converged;
    report.iterations = iter;
    report.final_residual = res;
    report.objective = loss_Q(LossSpec::hellinger(mu), ensemble, x);
    report.wall_time_sec = watch.seconds();
    return SolverResult{std::move(x), std::move(report)};
}

SolverResult ka_barycenter(const MeanDescriptor& sigma, const WeightedEnsemble& ensemble,
                           const SolverConfig& config) {
    validate_config(config);
    SigmaPotential potential(sigma);  // rejects non-symmetric or non-normalized sigma
    if (!sigma.has_full_range()) {
        throw DomainError("ka_barycenter: generator must be surjective onto (0, inf)");
    }
    Stopwatch watch;
    SpdMatrix x = initial_point(ensemble, config);
    const Eigen::Index n = ensemble.dim();
    auto residual_of = [&](const SpdMatrix& y) { return sigma_critical_residual(sigma, ensemble, y); };
    auto objective_of = [&](const SpdMatrix& y) {
        double total = 0.0;
        for (std::size_t j = 0; j < ensemble.size(); ++j) {
            total += ensemble.weight(j) * phi_sigma(potential, ensemble.matrix(j), y);
        }
        return total;
    };
    auto threshold = [&config](const SpdMatrix& y) {
        return config.tol * (1.0 + inverse_frobenius_norm(y));
    };
    SolverReport report;
    HermitianMatrix grad = residual_of(x);
    double res = grad.frobenius_norm();
    report.residual_history.push_back(res);
    bool converged = res <= threshold(x);
    int iter = 0;
    const int cg_cap = static_cast<int>(2 * n * n);
    while (!converged && iter < config.max_iter) {
        // Newton direction from CG on the finite-difference Hessian action.
        const double fd_step = std::min(1e-6 * (1.0 + x.frobenius_norm()), 0.1 * x.min_eigenvalue());
        auto hessian_action = [&](const ComplexMatrix& v) {
            const double vnorm = v.norm();
            SpdMatrix forward(ComplexMatrix(x.entries() + (fd_step / vnorm) * v));
            SpdMatrix backward(ComplexMatrix(x.entries() - (fd_step / vnorm) * v));
            ComplexMatrix diff = residual_of(forward).entries() - residual_of(backward).entries();
            return ComplexMatrix((vnorm / (2.0 * fd_step)) * diff);
        };
        ComplexMatrix rhs = -grad.entries();
        ComplexMatrix z = ComplexMatrix::Zero(n, n);
        ComplexMatrix r = rhs;
        ComplexMatrix p = rhs;
        double rs = herm_ip(r, r);
        const double cg_stop = 1e-2 * std::sqrt(rs);
        bool direction_ok = true;
        for (int k = 0; k < cg_cap && std::sqrt(rs) > cg_stop; ++k) {
            ComplexMatrix hp = hessian_action(p);
            const double php = herm_ip(p, hp);
            if (!(php > 0.0)) {
                if (k == 0) direction_ok = false;  // negative curvature straight away
                break;
            }
            const double alpha = rs / php;
            z += alpha * p;
            r -= alpha * hp;
            const double rs_new = herm_ip(r, r);
            p = r + (rs_new / rs) * p;
            rs = rs_new;
        }
        bool accepted = false;
        if (direction_ok && z.norm() > 0.0) {
            double theta = config.damping;
            while (true) {
                std::optional<SpdMatrix> candidate = try_spd(x.entries() + theta * z);
                if (candidate) {
                    HermitianMatrix cand_grad = residual_of(*candidate);
                    const double cand_res = cand_grad.frobenius_norm();
                    if (cand_res < res) {
                        x = std::move(*candidate);
                        grad = std::move(cand_grad);
                        res = cand_res;
                        accepted = true;
                        break;
                    }
                }
                if (theta <= kDampingFloor * (1.0 + 1e-9)) break;
                theta = std::max(0.5 * theta, kDampingFloor);
            }
        }
        if (!accepted) {
            // Armijo-backtracked steepest descent on the loss itself.
            const double q0 = objective_of(x);
            double t = std::min(1.0, 0.1 * (1.0 + x.frobenius_norm()) / res);
            for (int back = 0; back < 40; ++back) {
                std::optional<SpdMatrix> candidate = try_spd(x.entries() - t * grad.entries());
                if (candidate) {
                    const double qc = objective_of(*candidate);
                    if (qc <= q0 - 1e-4 * t * res * res) {
                        x = std::move(*candidate);
                        grad = residual_of(x);
                        res = grad.frobenius_norm();
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        if (!accepted) break;  // stagnated; report non-convergence honestly
        report.residual_history.push_back(res);
        ++iter;
        converged = res <= threshold(x);
    }
    report.converged = converged;
    report.iterations = iter;
    report.final_residual = res;
    report.objective = objective_of(x);
    report.wall_time_sec = watch.seconds();
    return SolverResult{std::move(x), std::move(report)};
}

SpdMatrix geometric_barycenter_closed_form(const WeightedEnsemble& ensemble) {
    return geometric_mean_two(ensemble.harmonic_mean(), ensemble.arithmetic_mean());
}

SpdMatrix geometric_mean_two(const SpdMatrix& a, const SpdMatrix& b) {
    return rtm_geodesic(a, b, 0.5).value;
}

} // namespace opmean
