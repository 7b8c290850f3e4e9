#pragma once

#include "resest/gpr.hpp"
#include "resest/measurement_model.hpp"
#include "resest/rng.hpp"
#include "resest/scenario_config.hpp"

#include <array>
#include <string>
#include <vector>

namespace resest {

struct TrialResult {
    int point = 0;             // index into the attack sweep
    double sweep_value = 0.0;  // percent attacked or number of targeted states
    int trial = 0;
    EstimatorKind estimator = EstimatorKind::LeastSquares;
    int attacked = 0;            // corrupted sensors or targeted states
    std::string status;          // optimal, max-iter, infeasible, error
    double rel_error = 0.0;      // |x_hat - x*|_2 / |x*|_2
    double max_abs_rel_error = 0.0;
    std::vector<double> target_rel_errors;  // |x_hat_j - x*_j| / |x*_j| per targeted state
    bool success = false;
    double wall_ms = 0.0;

    /// Root mean square of target_rel_errors (0 when there are no targets).
    double target_rms() const;
};

struct SuccessMetrics {
    int point = 0;
    double sweep_value = 0.0;
    EstimatorKind estimator = EstimatorKind::LeastSquares;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
    std::array<double, 5> error_quantiles{};   // min, 25%, median, 75%, max of rel_error
    std::array<double, 5> target_quantiles{};  // same for target_rms
};

/// Everything a scenario shares across trials.
struct Scenario {
    MeasurementModel model;
    Vector nominal;
    Matrix latent_basis;  // B, n x r
    Matrix aux_map;       // G, p x n
    GprModel prior;
};

/// One draw of the synthetic system.
struct TrialDraw {
    Vector x_true;
    Vector z;
    Vector y;  // attacked measurement
    IndexSet targets;
};

Scenario build_scenario(const ScenarioConfig& cfg);

/// State, auxiliary data and attacked measurements for one (point, trial).
TrialDraw draw_trial(const ScenarioConfig& cfg, const Scenario& sc, int point, int trial);

/// Runs every estimator on every (sweep point, trial). Results are ordered by
/// point, then trial, then estimator, and do not depend on the worker count.
std::vector<TrialResult> run_monte_carlo(const ScenarioConfig& cfg);

/// Linear-interpolation quantile (the "type 7" rule) of unsorted data.
double quantile(std::vector<double> values, double p);

/// Per (point, estimator) success rate and error quantiles. Throws EmptyInput.
std::vector<SuccessMetrics> summarize(const std::vector<TrialResult>& results);

}  // namespace resest
