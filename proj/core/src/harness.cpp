#include "resest/harness.hpp"

#include "resest/attack.hpp"
#include "resest/decoder.hpp"
#include "resest/errors.hpp"
#include "resest/weighted_l1.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace resest {
namespace {

// Independent random streams derived from the master seed.
constexpr std::uint64_t kStreamModel = 1;
constexpr std::uint64_t kStreamTraining = 2;
constexpr std::uint64_t kStreamTrial = 3;
constexpr std::uint64_t kStreamAttack = 1000;

constexpr double kInf = std::numeric_limits<double>::infinity();

MeasurementModel scenario_model(const ScenarioConfig& cfg) {
    GridSpec grid = cfg.grid;
    if (cfg.noise_std) {
        grid.noise_std = {*cfg.noise_std};
    }
    return build_dc_grid_model(grid);
}

Matrix normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            a(i, j) = scale * rng.normal();
        }
    }
    return a;
}

struct StateSample {
    Vector x;
    Vector z;
    Vector noise;
};

struct Generator {
    const MeasurementModel& model;
    const Vector& nominal;
    const Matrix& latent_basis;
    const Matrix& aux_map;
};

StateSample draw_state(const ScenarioConfig& cfg, const Generator& sc, Rng& rng) {
    StateSample s;
    const auto n = sc.nominal.size();
    const Vector u = cfg.state.latent_scale * rng.normal_vector(sc.latent_basis.cols());
    s.x = sc.nominal + sc.latent_basis * u;
    if (cfg.state.jitter_std > 0.0) {
        s.x += cfg.state.jitter_std * rng.normal_vector(n);
    }
    s.z = sc.aux_map * s.x;
    if (cfg.auxiliary.noise_std > 0.0) {
        s.z += cfg.auxiliary.noise_std * rng.normal_vector(s.z.size());
    }
    s.noise = sc.model.noise_std().cwiseProduct(rng.normal_vector(sc.model.measurements()));
    return s;
}

struct EstimateOutcome {
    Vector x;
    std::string status = "optimal";
};

EstimateOutcome run_estimator(EstimatorKind kind, const ScenarioConfig& cfg, const Scenario& sc,
                              const TrialDraw& draw) {
    EstimateOutcome out;
    switch (kind) {
        case EstimatorKind::LeastSquares:
            out.x = least_squares(sc.model.h(), draw.y);
            break;
        case EstimatorKind::ReweightedL1: {
            const EstimateReport r = reweighted_l1(sc.model, draw.y, std::nullopt, cfg.decoder);
            out.x = r.x_hat;
            out.status = std::string(to_string(r.status));
            break;
        }
        case EstimatorKind::ReweightedL1Prior: {
            const EstimateReport r = resilient_estimate(sc.model, sc.prior, draw.z, draw.y, cfg.decoder);
            out.x = r.x_hat;
            out.status = std::string(to_string(r.status));
            break;
        }
    }
    return out;
}

TrialResult evaluate(const ScenarioConfig& cfg, const Scenario& sc, const TrialDraw& draw, int point,
                     int trial, EstimatorKind kind) {
    TrialResult r;
    r.point = point;
    r.sweep_value = cfg.attack.sweep[static_cast<std::size_t>(point)];
    r.trial = trial;
    r.estimator = kind;
    r.attacked = static_cast<int>(draw.targets.size());

    const auto start = std::chrono::steady_clock::now();
    EstimateOutcome est;
    try {
        est = run_estimator(kind, cfg, sc, draw);
    } catch (const InfeasibleProblem&) {
        est.status = "infeasible";
    } catch (const NumericalError&) {
        est.status = "error";
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    r.status = est.status;

    const bool targeted = cfg.attack.kind == AttackKind::StateTargeted;
    if (est.x.size() == 0) {
        r.rel_error = kInf;
        r.max_abs_rel_error = kInf;
        if (targeted) {
            r.target_rel_errors.assign(draw.targets.size(), kInf);
        }
        return r;
    }
    const Vector diff = est.x - draw.x_true;
    r.rel_error = diff.norm() / std::max(draw.x_true.norm(), std::numeric_limits<double>::min());
    for (Eigen::Index j = 0; j < diff.size(); ++j) {
        if (draw.x_true(j) != 0.0) {
            r.max_abs_rel_error = std::max(r.max_abs_rel_error, std::abs(diff(j) / draw.x_true(j)));
        }
    }
    if (targeted) {
        for (int j : draw.targets) {
            r.target_rel_errors.push_back(std::abs(diff(j)) /
                                          std::max(std::abs(draw.x_true(j)), std::numeric_limits<double>::min()));
        }
    }
    r.success = r.rel_error <= cfg.success_threshold;
    return r;
}

}  // namespace

double TrialResult::target_rms() const {
    if (target_rel_errors.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : target_rel_errors) {
        sum += v * v;
    }
    return std::sqrt(sum / static_cast<double>(target_rel_errors.size()));
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    validate_scenario_config(cfg);
    MeasurementModel model = scenario_model(cfg);
    const int n = model.states();
    const int m = model.measurements();

    Vector nominal = Vector::Zero(n);
    if (!cfg.state.nominal.empty()) {
        if (static_cast<int>(cfg.state.nominal.size()) != n) {
            throw ConfigError("config.state_model.nominal: expected " + std::to_string(n) + " values, got " +
                              std::to_string(cfg.state.nominal.size()));
        }
        nominal = Eigen::Map<const Vector>(cfg.state.nominal.data(), n);
    }
    if (cfg.attack.kind == AttackKind::StateTargeted) {
        for (std::size_t i = 0; i < cfg.attack.sweep.size(); ++i) {
            if (cfg.attack.sweep[i] > n) {
                throw ConfigError("config.attack.sweep[" + std::to_string(i) + "]: more targets than states");
            }
        }
    }

    Rng rng(derive_seed(cfg.seed, kStreamModel));
    Matrix basis = normal_matrix(rng, n, cfg.state.latent_dim, 1.0);
    Matrix aux = normal_matrix(rng, cfg.auxiliary.channels, n, cfg.auxiliary.gain);

    // The prior is trained on a historical record of auxiliary data and
    // attack-free measurements.
    const Generator gen{model, nominal, basis, aux};
    const int samples = cfg.gpr.training_samples;
    Matrix z(cfg.auxiliary.channels, samples);
    Matrix y(m, samples);
    Rng train_rng(derive_seed(cfg.seed, kStreamTraining));
    for (int i = 0; i < samples; ++i) {
        const StateSample s = draw_state(cfg, gen, train_rng);
        z.col(i) = s.z;
        y.col(i) = model.h() * s.x + s.noise;
    }
    KernelParams params{cfg.gpr.amplitude, cfg.gpr.lengthscale, Vector::Constant(m, cfg.gpr.noise_std)};
    TrainOptions opts;
    opts.center_targets = cfg.gpr.center_targets;
    opts.jitter_on_failure = cfg.gpr.jitter_on_failure;
    GprModel prior = GprModel::train(std::move(z), std::move(y), std::move(params), opts);
    return Scenario{std::move(model), std::move(nominal), std::move(basis), std::move(aux), std::move(prior)};
}

TrialDraw draw_trial(const ScenarioConfig& cfg, const Scenario& sc, int point, int trial) {
    // The same trial index sees the same state and noise at every sweep point.
    Rng rng(derive_seed(derive_seed(cfg.seed, kStreamTrial), static_cast<std::uint64_t>(trial)));
    const StateSample s = draw_state(cfg, Generator{sc.model, sc.nominal, sc.latent_basis, sc.aux_map}, rng);
    TrialDraw d;
    d.x_true = s.x;
    d.z = s.z;
    const Vector y_clean = sc.model.h() * s.x + s.noise;

    const std::uint64_t attack_seed = derive_seed(
        derive_seed(cfg.seed, kStreamAttack + static_cast<std::uint64_t>(point)), static_cast<std::uint64_t>(trial));
    const double value = cfg.attack.sweep[static_cast<std::size_t>(point)];
    if (cfg.attack.kind == AttackKind::SensorBias) {
        const int m = sc.model.measurements();
        const auto count = static_cast<int>(std::lround(value / 100.0 * m));
        d.targets = random_support(m, count, derive_seed(attack_seed, 0));
        d.y = d.targets.empty() ? y_clean
                                : sensor_bias_attack(y_clean, d.targets, cfg.attack.magnitude,
                                                     derive_seed(attack_seed, 1));
    } else {
        const auto count = static_cast<int>(value);
        d.targets = random_support(sc.model.states(), count, derive_seed(attack_seed, 0));
        d.y = y_clean + state_targeted_attack(sc.model.h(), d.targets, cfg.attack.magnitude, s.x);
    }
    return d;
}

std::vector<TrialResult> run_monte_carlo(const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    const int points = static_cast<int>(cfg.attack.sweep.size());
    const int jobs = points * cfg.trials;
    std::vector<std::vector<TrialResult>> slots(static_cast<std::size_t>(jobs));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int job = next++; job < jobs; job = next++) {
            try {
                const int point = job / cfg.trials;
                const int trial = job % cfg.trials;
                const TrialDraw draw = draw_trial(cfg, sc, point, trial);
                auto& out = slots[static_cast<std::size_t>(job)];
                for (EstimatorKind kind : cfg.estimators) {
                    out.push_back(evaluate(cfg, sc, draw, point, trial, kind));
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs;
            }
        }
    };
    int workers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, jobs));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::vector<TrialResult> results;
    results.reserve(static_cast<std::size_t>(jobs) * cfg.estimators.size());
    for (auto& slot : slots) {
        for (auto& r : slot) {
            results.push_back(std::move(r));
        }
    }
    return results;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw EmptyInput("quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("quantile level must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || values[lo + 1] == values[lo]) {
        return values[lo];
    }
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<SuccessMetrics> summarize(const std::vector<TrialResult>& results) {
    if (results.empty()) {
        throw EmptyInput("no trial results to summarize");
    }
    std::map<std::pair<int, int>, std::vector<const TrialResult*>> groups;
    for (const auto& r : results) {
        groups[{r.point, static_cast<int>(r.estimator)}].push_back(&r);
    }
    constexpr std::array<double, 5> levels{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<SuccessMetrics> out;
    for (const auto& [key, members] : groups) {
        SuccessMetrics s;
        s.point = key.first;
        s.estimator = static_cast<EstimatorKind>(key.second);
        s.sweep_value = members.front()->sweep_value;
        s.trials = static_cast<int>(members.size());
        std::vector<double> errors;
        std::vector<double> targets;
        for (const TrialResult* r : members) {
            s.successes += r->success ? 1 : 0;
            errors.push_back(r->rel_error);
            if (!r->target_rel_errors.empty()) {
                targets.push_back(r->target_rms());
            }
        }
        s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            s.error_quantiles[i] = quantile(errors, levels[i]);
            s.target_quantiles[i] =
                targets.empty() ? std::numeric_limits<double>::quiet_NaN() : quantile(targets, levels[i]);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace resest
