#pragma once

#include "resest/attack.hpp"
#include "resest/decoder.hpp"
#include "resest/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace resest {

enum class EstimatorKind { LeastSquares, ReweightedL1, ReweightedL1Prior };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

/// x* = nominal + B u + jitter with u ~ N(0, latent_scale^2 I_r) and a fixed random B.
struct StateModelConfig {
    std::vector<double> nominal;  // empty means zeros
    int latent_dim = 3;
    double latent_scale = 0.02;
    double jitter_std = 0.0;
};

/// z = G x* + noise, G a fixed p x n matrix with N(0, gain^2) entries.
struct AuxiliaryConfig {
    int channels = 4;
    double gain = 1.0;
    double noise_std = 0.0;
};

struct GprConfig {
    double amplitude = 1.0;
    double lengthscale = 1.0;
    double noise_std = 0.01;
    int training_samples = 200;
    bool center_targets = true;
    bool jitter_on_failure = false;
};

/// Sweep points are attacked-sensor percentages (sensor bias) or numbers of
/// targeted states (state targeted).
struct AttackConfig {
    AttackKind kind = AttackKind::SensorBias;
    double magnitude = 5.0;
    std::vector<double> sweep;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::string grid_source;  // path as written in the config, or "inline"
    GridSpec grid;
    std::optional<double> noise_std;
    StateModelConfig state;
    AuxiliaryConfig auxiliary;
    GprConfig gpr;
    AttackConfig attack;
    std::vector<EstimatorKind> estimators{EstimatorKind::LeastSquares, EstimatorKind::ReweightedL1,
                                          EstimatorKind::ReweightedL1Prior};
    int trials = 200;
    double success_threshold = 0.05;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 means hardware concurrency
    DecoderConfig decoder;
};

/// Parses a scenario document; relative grid paths resolve against base_dir.
/// Errors are ConfigError with the offending field path.
ScenarioConfig parse_scenario_config(const std::string& json_text, const std::string& base_dir = ".");
ScenarioConfig load_scenario_config(const std::string& path);

/// Re-checks invariants after programmatic edits (CLI overrides, tests).
void validate_scenario_config(const ScenarioConfig& cfg);

/// Canonical JSON echo of the configuration, used in manifests.
std::string scenario_config_json(const ScenarioConfig& cfg);

}  // namespace resest
