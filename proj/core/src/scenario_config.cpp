#include "resest/scenario_config.hpp"

#include "resest/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace resest {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

/// Typed access to one JSON object with field paths in every error.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    void allow(std::initializer_list<const char*> keys) const {
        const std::set<std::string> known(keys.begin(), keys.end());
        for (const auto& [key, value] : j_.items()) {
            if (!known.count(key)) {
                throw ConfigError(path_ + "." + key + ": unknown field");
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    template <typename T>
    T get(const char* key) const {
        if (!has(key)) {
            throw ConfigError(at(key) + ": missing");
        }
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(at(key) + ": wrong type");
        }
    }

    template <typename T>
    T get_or(const char* key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    Section child(const char* key) const { return Section(j_.at(key), at(key)); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string at(const char* key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
};

void require(bool ok, const std::string& path, const char* what) {
    if (!ok) {
        throw ConfigError(path + ": " + what);
    }
}

AttackKind parse_attack_kind(const std::string& s, const std::string& path) {
    if (s == "sensor-bias") return AttackKind::SensorBias;
    if (s == "state-targeted") return AttackKind::StateTargeted;
    throw ConfigError(path + ": expected 'sensor-bias' or 'state-targeted'");
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::LeastSquares: return "least-squares";
        case EstimatorKind::ReweightedL1: return "reweighted-l1";
        case EstimatorKind::ReweightedL1Prior: return "reweighted-l1-prior";
    }
    return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
    if (name == "least-squares") return EstimatorKind::LeastSquares;
    if (name == "reweighted-l1") return EstimatorKind::ReweightedL1;
    if (name == "reweighted-l1-prior") return EstimatorKind::ReweightedL1Prior;
    throw ConfigError("unknown estimator '" + std::string(name) +
                      "' (expected least-squares, reweighted-l1 or reweighted-l1-prior)");
}

ScenarioConfig parse_scenario_config(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    const Section root(doc, "config");
    root.allow({"name", "grid", "noise_std", "state_model", "auxiliary", "gpr", "attack", "estimators",
                "trials", "success_threshold", "seed", "workers", "decoder", "solver"});

    ScenarioConfig cfg;
    cfg.name = root.get_or<std::string>("name", cfg.name);

    if (!root.has("grid")) {
        throw ConfigError("config.grid: missing");
    }
    const json& grid = root.raw("grid");
    if (grid.is_string()) {
        cfg.grid_source = grid.get<std::string>();
        std::filesystem::path p(cfg.grid_source);
        if (p.is_relative()) {
            p = std::filesystem::path(base_dir) / p;
        }
        cfg.grid = load_grid_spec(p.string());
    } else if (grid.is_object()) {
        cfg.grid_source = "inline";
        cfg.grid = parse_grid_spec(grid.dump());
    } else {
        throw ConfigError("config.grid: expected a path or an inline grid object");
    }

    if (root.has("noise_std")) {
        cfg.noise_std = root.get<double>("noise_std");
    }

    if (root.has("state_model")) {
        const Section s = root.child("state_model");
        s.allow({"nominal", "latent_dim", "latent_scale", "jitter_std"});
        cfg.state.nominal = s.get_or<std::vector<double>>("nominal", {});
        cfg.state.latent_dim = s.get_or<int>("latent_dim", cfg.state.latent_dim);
        cfg.state.latent_scale = s.get_or<double>("latent_scale", cfg.state.latent_scale);
        cfg.state.jitter_std = s.get_or<double>("jitter_std", cfg.state.jitter_std);
    }
    if (root.has("auxiliary")) {
        const Section s = root.child("auxiliary");
        s.allow({"channels", "gain", "noise_std"});
        cfg.auxiliary.channels = s.get_or<int>("channels", cfg.auxiliary.channels);
        cfg.auxiliary.gain = s.get_or<double>("gain", cfg.auxiliary.gain);
        cfg.auxiliary.noise_std = s.get_or<double>("noise_std", cfg.auxiliary.noise_std);
    }
    if (root.has("gpr")) {
        const Section s = root.child("gpr");
        s.allow({"amplitude", "lengthscale", "noise_std", "training_samples", "center_targets",
                 "jitter_on_failure"});
        cfg.gpr.amplitude = s.get_or<double>("amplitude", cfg.gpr.amplitude);
        cfg.gpr.lengthscale = s.get_or<double>("lengthscale", cfg.gpr.lengthscale);
        cfg.gpr.noise_std = s.get_or<double>("noise_std", cfg.gpr.noise_std);
        cfg.gpr.training_samples = s.get_or<int>("training_samples", cfg.gpr.training_samples);
        cfg.gpr.center_targets = s.get_or<bool>("center_targets", cfg.gpr.center_targets);
        cfg.gpr.jitter_on_failure = s.get_or<bool>("jitter_on_failure", cfg.gpr.jitter_on_failure);
    }
    {
        const Section s = root.child("attack");
        s.allow({"kind", "magnitude", "sweep"});
        cfg.attack.kind = parse_attack_kind(s.get<std::string>("kind"), s.at("kind"));
        cfg.attack.magnitude =
            s.get_or<double>("magnitude", cfg.attack.kind == AttackKind::SensorBias ? 5.0 : 0.5);
        cfg.attack.sweep = s.get<std::vector<double>>("sweep");
    }
    if (root.has("estimators")) {
        cfg.estimators.clear();
        const auto names = root.get<std::vector<std::string>>("estimators");
        for (std::size_t i = 0; i < names.size(); ++i) {
            try {
                cfg.estimators.push_back(parse_estimator(names[i]));
            } catch (const ConfigError& e) {
                throw ConfigError(root.at("estimators") + "[" + std::to_string(i) + "]: " + e.what());
            }
        }
    }
    cfg.trials = root.get_or<int>("trials", cfg.trials);
    cfg.success_threshold = root.get_or<double>("success_threshold", cfg.success_threshold);
    cfg.seed = root.get_or<std::uint64_t>("seed", cfg.seed);
    cfg.workers = root.get_or<int>("workers", cfg.workers);

    if (root.has("decoder")) {
        const Section s = root.child("decoder");
        s.allow({"tau", "damping", "max_reweight_iters", "convergence_tol", "noise_constraint", "predictive_prior"});
        cfg.decoder.tau = s.get_or<double>("tau", cfg.decoder.tau);
        if (s.has("damping")) {
            cfg.decoder.damping = s.get<double>("damping");
        }
        cfg.decoder.max_reweight_iters = s.get_or<int>("max_reweight_iters", cfg.decoder.max_reweight_iters);
        cfg.decoder.convergence_tol = s.get_or<double>("convergence_tol", cfg.decoder.convergence_tol);
        cfg.decoder.noise_constraint = s.get_or<bool>("noise_constraint", cfg.decoder.noise_constraint);
        cfg.decoder.predictive_prior = s.get_or<bool>("predictive_prior", cfg.decoder.predictive_prior);
    }
    if (root.has("solver")) {
        const Section s = root.child("solver");
        s.allow({"tol", "max_iter"});
        cfg.decoder.solver.tol = s.get_or<double>("tol", cfg.decoder.solver.tol);
        cfg.decoder.solver.max_iter = s.get_or<int>("max_iter", cfg.decoder.solver.max_iter);
    }
    validate_scenario_config(cfg);
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

void validate_scenario_config(const ScenarioConfig& cfg) {
    require(cfg.trials >= 1, "config.trials", "must be at least 1");
    require(cfg.success_threshold > 0.0, "config.success_threshold", "must be positive");
    require(cfg.workers >= 0, "config.workers", "must be nonnegative");
    require(!cfg.estimators.empty(), "config.estimators", "must name at least one estimator");
    if (cfg.noise_std) {
        require(*cfg.noise_std > 0.0, "config.noise_std", "must be positive");
    }
    require(cfg.state.latent_dim >= 0, "config.state_model.latent_dim", "must be nonnegative");
    require(cfg.state.latent_scale >= 0.0, "config.state_model.latent_scale", "must be nonnegative");
    require(cfg.state.jitter_std >= 0.0, "config.state_model.jitter_std", "must be nonnegative");
    require(cfg.auxiliary.channels >= 1, "config.auxiliary.channels", "must be at least 1");
    require(std::isfinite(cfg.auxiliary.gain), "config.auxiliary.gain", "must be finite");
    require(cfg.auxiliary.noise_std >= 0.0, "config.auxiliary.noise_std", "must be nonnegative");
    require(cfg.gpr.amplitude > 0.0, "config.gpr.amplitude", "must be positive");
    require(cfg.gpr.lengthscale > 0.0, "config.gpr.lengthscale", "must be positive");
    require(cfg.gpr.noise_std >= 0.0, "config.gpr.noise_std", "must be nonnegative");
    require(cfg.gpr.training_samples >= 1, "config.gpr.training_samples", "must be at least 1");
    require(cfg.attack.magnitude >= 0.0, "config.attack.magnitude", "must be nonnegative");
    require(!cfg.attack.sweep.empty(), "config.attack.sweep", "must list at least one point");
    for (std::size_t i = 0; i < cfg.attack.sweep.size(); ++i) {
        const double v = cfg.attack.sweep[i];
        const std::string path = "config.attack.sweep[" + std::to_string(i) + "]";
        if (cfg.attack.kind == AttackKind::SensorBias) {
            require(v >= 0.0 && v <= 100.0, path, "percentages must lie in [0, 100]");
        } else {
            require(v >= 0.0 && v == std::floor(v), path, "targeted state counts must be whole numbers");
        }
    }
    require(cfg.decoder.tau > 0.0 && cfg.decoder.tau < 1.0, "config.decoder.tau", "must lie in (0, 1)");
    if (cfg.decoder.damping) {
        require(*cfg.decoder.damping > 0.0, "config.decoder.damping", "must be positive");
    }
    require(cfg.decoder.max_reweight_iters >= 1, "config.decoder.max_reweight_iters", "must be at least 1");
    require(cfg.decoder.convergence_tol > 0.0, "config.decoder.convergence_tol", "must be positive");
    require(cfg.decoder.solver.tol > 0.0, "config.solver.tol", "must be positive");
    require(cfg.decoder.solver.max_iter >= 1, "config.solver.max_iter", "must be at least 1");
}

std::string scenario_config_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["name"] = cfg.name;
    j["grid"] = cfg.grid_source;
    j["noise_std"] = cfg.noise_std ? ordered_json(*cfg.noise_std) : ordered_json(nullptr);
    j["state_model"] = {{"nominal", cfg.state.nominal},
                        {"latent_dim", cfg.state.latent_dim},
                        {"latent_scale", cfg.state.latent_scale},
                        {"jitter_std", cfg.state.jitter_std}};
    j["auxiliary"] = {{"channels", cfg.auxiliary.channels},
                      {"gain", cfg.auxiliary.gain},
                      {"noise_std", cfg.auxiliary.noise_std}};
    j["gpr"] = {{"amplitude", cfg.gpr.amplitude},
                {"lengthscale", cfg.gpr.lengthscale},
                {"noise_std", cfg.gpr.noise_std},
                {"training_samples", cfg.gpr.training_samples},
                {"center_targets", cfg.gpr.center_targets},
                {"jitter_on_failure", cfg.gpr.jitter_on_failure}};
    j["attack"] = {{"kind", std::string(to_string(cfg.attack.kind))},
                   {"magnitude", cfg.attack.magnitude},
                   {"sweep", cfg.attack.sweep}};
    std::vector<std::string> names;
    for (auto e : cfg.estimators) {
        names.emplace_back(to_string(e));
    }
    j["estimators"] = names;
    j["trials"] = cfg.trials;
    j["success_threshold"] = cfg.success_threshold;
    j["seed"] = cfg.seed;
    j["decoder"] = {{"tau", cfg.decoder.tau},
                    {"damping", cfg.decoder.damping ? ordered_json(*cfg.decoder.damping) : ordered_json(nullptr)},
                    {"max_reweight_iters", cfg.decoder.max_reweight_iters},
                    {"convergence_tol", cfg.decoder.convergence_tol},
                    {"noise_constraint", cfg.decoder.noise_constraint},
                    {"predictive_prior", cfg.decoder.predictive_prior}};
    j["solver"] = {{"tol", cfg.decoder.solver.tol}, {"max_iter", cfg.decoder.solver.max_iter}};
    return j.dump(2);
}

}  // namespace resest
