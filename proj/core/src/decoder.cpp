#include "resest/decoder.hpp"

#include "resest/chi2.hpp"
#include "resest/errors.hpp"
#include "resest/sparsity.hpp"
#include "resest/subsets.hpp"

#include <cmath>
#include <string>

namespace resest {
namespace {

void check_measurements(const MeasurementModel& model, const Vector& y) {
    if (y.size() != model.measurements()) {
        throw ShapeError("measurement vector has " + std::to_string(y.size()) + " entries, model has " +
                         std::to_string(model.measurements()));
    }
    if (!y.allFinite()) {
        throw DomainError("measurement vector contains non-finite entries");
    }
}

void check_config(const DecoderConfig& cfg) {
    if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) {
        throw DomainError("decoder tau must lie in (0, 1)");
    }
    if (cfg.damping && !(*cfg.damping > 0.0)) {
        throw DomainError("re-weighting damping must be positive");
    }
    if (cfg.max_reweight_iters < 1) {
        throw DomainError("max_reweight_iters must be at least 1");
    }
    if (!(cfg.convergence_tol > 0.0)) {
        throw DomainError("convergence_tol must be positive");
    }
}

double log_penalty(const Vector& r, double damping) {
    return (r.cwiseAbs().array() + damping).log().sum();
}

}  // namespace

Vector reweight(const Vector& r, double damping) {
    if (!(damping > 0.0)) {
        throw DomainError("re-weighting damping must be positive");
    }
    return (r.cwiseAbs().array() + damping).inverse();
}

Decoded l0_bruteforce_decode(const MeasurementModel& model, const Vector& y, int k_max) {
    check_measurements(model, y);
    const int m = model.measurements();
    if (k_max < 0 || k_max > m) {
        throw DomainError("k_max must lie in [0, m]");
    }
    std::uint64_t total = 0;
    for (int p = 0; p <= k_max; ++p) {
        total += binomial(m, p);
    }
    require_enumerable(total, "l0_bruteforce_decode");
    const auto e = find_sparse_feasible(residual_projector(model.qr()), y, k_max);
    if (!e) {
        throw NoFeasibleSupport("no attack with at most " + std::to_string(k_max) +
                                " corrupted sensors explains y");
    }
    return {model.state_from(y - *e), *e};
}

Decoded l1_decode(const MeasurementModel& model, const Vector& y, const ConicOptions& opts) {
    check_measurements(model, y);
    const Vector e = solve_l1_equality(residual_projector(model.qr()), y, opts);
    return {model.state_from(y - e), e};
}

IndexSet attack_support(const Vector& e_hat, const Vector& y) {
    const double threshold = 1e-6 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
    IndexSet support;
    for (Eigen::Index j = 0; j < e_hat.size(); ++j) {
        if (std::abs(e_hat(j)) > threshold) {
            support.push_back(static_cast<int>(j));
        }
    }
    return support;
}

EstimateReport reweighted_l1(const MeasurementModel& model, const Vector& y,
                             const std::optional<EllipsoidConstraint>& prior, const DecoderConfig& cfg) {
    check_measurements(model, y);
    check_config(cfg);
    const int m = model.measurements();

    WeightedL1Problem problem;
    problem.h = model.h();
    problem.y = y;
    problem.prior = prior;
    if (cfg.noise_constraint) {
        EllipsoidConstraint noise;
        noise.center = Vector::Zero(m);
        noise.inv_weights = model.noise_std().cwiseAbs2().cwiseInverse();
        noise.radius_sq = chi2_quantile(m, cfg.tau);
        problem.noise = noise;
    }

    EstimateReport report;
    report.damping = cfg.damping.value_or(1e-4 * y.lpNorm<Eigen::Infinity>());
    if (!(report.damping > 0.0)) {
        report.damping = 1e-4;
    }
    for (int iter = 0; iter < cfg.max_reweight_iters; ++iter) {
        const Solution sol = solve_weighted_l1(problem, cfg.solver);
        if (sol.status == SolveStatus::Infeasible) {
            throw InfeasibleProblem("the prior and noise ellipsoids admit no measurement; tau may be too small "
                                    "or the prior misspecified");
        }
        if (sol.status == SolveStatus::MaxIter) {
            report.status = SolveStatus::MaxIter;
        }
        report.x_hat = sol.x;
        report.eps_hat = sol.eps;
        report.iterations = iter + 1;
        const Vector r = y - model.h() * sol.x - sol.eps;
        const double penalty = log_penalty(r, report.damping);
        report.objective_trace.push_back(penalty);
        if (iter > 0) {
            const double prev = report.objective_trace[report.objective_trace.size() - 2];
            if (std::abs(prev - penalty) < cfg.convergence_tol * std::max(1.0, std::abs(prev))) {
                break;
            }
        }
        problem.weights = reweight(r, report.damping);
    }
    report.e_hat = y - model.h() * report.x_hat - report.eps_hat;
    report.support = attack_support(report.e_hat, y);
    return report;
}

EstimateReport resilient_estimate(const MeasurementModel& model, const GprModel& prior, const Vector& z,
                                  const Vector& y, const DecoderConfig& cfg) {
    check_config(cfg);
    if (prior.channels() != model.measurements()) {
        throw ShapeError("GPR prior has " + std::to_string(prior.channels()) + " channels, model has " +
                         std::to_string(model.measurements()) + " measurements");
    }
    GprPosterior post = prior.posterior(z);
    if (cfg.predictive_prior) {
        post.sigma += prior.params().noise_std.cwiseAbs2();
    }
    return reweighted_l1(model, y, likelihood_ellipsoid(post, cfg.tau), cfg);
}

}  // namespace resest
