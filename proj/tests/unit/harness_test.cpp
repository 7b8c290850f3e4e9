#include "resest/errors.hpp"
#include "resest/harness.hpp"
#include "resest/report_io.hpp"
#include "resest/scenario_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace resest;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_scenario() {
    ScenarioConfig cfg;
    cfg.name = "tri3-test";
    cfg.grid_source = "tri3.json";
    cfg.grid = load_grid_spec(std::string(RESEST_DATA_DIR) + "/grids/tri3.json");
    cfg.noise_std = 1e-4;
    cfg.state.nominal = {-0.1, -0.15};
    cfg.state.latent_dim = 2;
    cfg.state.latent_scale = 0.01;
    cfg.auxiliary.channels = 2;
    cfg.auxiliary.gain = 10.0;
    cfg.gpr.lengthscale = 1.0;
    cfg.gpr.noise_std = 1e-4;
    cfg.gpr.training_samples = 60;
    cfg.attack.kind = AttackKind::SensorBias;
    cfg.attack.sweep = {0.0};
    cfg.trials = 6;
    cfg.seed = 77;
    cfg.workers = 1;
    return cfg;
}

TrialResult row(int point, EstimatorKind est, double err, bool ok) {
    TrialResult r;
    r.point = point;
    r.estimator = est;
    r.rel_error = err;
    r.success = ok;
    r.status = "optimal";
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("resest_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

bool same_result(const TrialResult& a, const TrialResult& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    if (a.target_rel_errors.size() != b.target_rel_errors.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.target_rel_errors.size(); ++i) {
        if (!same(a.target_rel_errors[i], b.target_rel_errors[i])) {
            return false;
        }
    }
    return a.point == b.point && a.sweep_value == b.sweep_value && a.trial == b.trial &&
           a.estimator == b.estimator && a.attacked == b.attacked && a.status == b.status &&
           same(a.rel_error, b.rel_error) && same(a.max_abs_rel_error, b.max_abs_rel_error) &&
           a.success == b.success;
}

}  // namespace

TEST(Quantile, LinearInterpolation) {
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile({7}, 0.3), 7.0);
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(quantile({1, inf, inf}, 1.0), inf);
    EXPECT_DOUBLE_EQ(quantile({1, 2, inf}, 0.5), 2.0);
    EXPECT_THROW(quantile({}, 0.5), EmptyInput);
    EXPECT_THROW(quantile({1}, 1.5), DomainError);
}

TEST(Summarize, RatesAndQuantiles) {
    std::vector<TrialResult> rs;
    for (int i = 0; i < 4; ++i) {
        rs.push_back(row(0, EstimatorKind::LeastSquares, 0.01 * (i + 1), true));
        rs.push_back(row(0, EstimatorKind::ReweightedL1, 0.01 * (i + 1), i % 2 == 0));
    }
    const auto m = summarize(rs);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].estimator, EstimatorKind::LeastSquares);
    EXPECT_DOUBLE_EQ(m[0].success_rate, 1.0);
    EXPECT_EQ(m[0].trials, 4);
    EXPECT_DOUBLE_EQ(m[1].success_rate, 0.5);
    EXPECT_DOUBLE_EQ(m[1].error_quantiles[2], 0.025);
    EXPECT_DOUBLE_EQ(m[1].error_quantiles[0], 0.01);
    EXPECT_DOUBLE_EQ(m[1].error_quantiles[4], 0.04);
    EXPECT_THROW(summarize({}), EmptyInput);
}

TEST(RunMonteCarlo, CleanRunSucceedsEverywhere) {
    ScenarioConfig cfg = small_scenario();
    cfg.noise_std = 1e-9;
    cfg.decoder.noise_constraint = false;
    const auto results = run_monte_carlo(cfg);
    ASSERT_EQ(results.size(), static_cast<std::size_t>(cfg.trials * 3));
    for (const auto& m : summarize(results)) {
        EXPECT_DOUBLE_EQ(m.success_rate, 1.0) << to_string(m.estimator);
    }
    for (const auto& r : results) {
        EXPECT_EQ(r.attacked, 0);
        EXPECT_LT(r.rel_error, 1e-5);
        EXPECT_EQ(r.success, r.rel_error <= cfg.success_threshold);
    }
}

TEST(RunMonteCarlo, StealthyAttackBiasesEstimatorsWithoutPrior) {
    ScenarioConfig cfg = small_scenario();
    cfg.attack.kind = AttackKind::StateTargeted;
    cfg.attack.magnitude = 0.5;
    cfg.attack.sweep = {1.0};
    cfg.trials = 10;
    const auto results = run_monte_carlo(cfg);
    for (const auto& r : results) {
        ASSERT_EQ(r.target_rel_errors.size(), 1u);
        if (r.estimator == EstimatorKind::ReweightedL1Prior) {
            EXPECT_LT(r.target_rel_errors[0], 0.1);
        } else {
            EXPECT_NEAR(r.target_rel_errors[0], 0.5, 0.02) << to_string(r.estimator);
        }
    }
}

TEST(RunMonteCarlo, ResultsDoNotDependOnWorkerCount) {
    ScenarioConfig cfg = small_scenario();
    cfg.attack.sweep = {0.0, 20.0};
    cfg.trials = 5;
    const auto serial = run_monte_carlo(cfg);
    cfg.workers = 3;
    const auto parallel = run_monte_carlo(cfg);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_TRUE(same_result(serial[i], parallel[i])) << "row " << i;
    }
    EXPECT_EQ(results_csv(serial), results_csv(parallel));
}

TEST(RunMonteCarlo, RejectsOversizedStateSweep) {
    ScenarioConfig cfg = small_scenario();
    cfg.attack.kind = AttackKind::StateTargeted;
    cfg.attack.sweep = {3.0};
    EXPECT_THROW(run_monte_carlo(cfg), ConfigError);
}

TEST(EmitReport, RoundTripsResults) {
    ScenarioConfig cfg = small_scenario();
    cfg.attack.sweep = {0.0, 30.0};
    cfg.trials = 3;
    auto results = run_monte_carlo(cfg);
    results.back().rel_error = std::numeric_limits<double>::infinity();
    results.back().status = "error";
    results.back().success = false;
    const TempDir dir;
    const ReportFiles files = emit_report(cfg, summarize(results), results, dir.path);
    EXPECT_EQ(files.written.size(), 4u);
    const auto back = read_results(dir.path);
    ASSERT_EQ(back.size(), results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        EXPECT_TRUE(same_result(back[i], results[i])) << "row " << i;
    }

    std::ifstream manifest(dir.path / "manifest.json");
    std::stringstream text;
    text << manifest.rdbuf();
    EXPECT_NE(text.str().find("\"seed\": 77"), std::string::npos) << text.str();
}

TEST(EmitReport, JsonFormatWritesJsonTables) {
    ScenarioConfig cfg = small_scenario();
    cfg.trials = 2;
    const auto results = run_monte_carlo(cfg);
    const TempDir dir;
    emit_report(cfg, summarize(results), results, dir.path, ReportFormat::Json);
    EXPECT_TRUE(fs::exists(dir.path / "results.json"));
    EXPECT_TRUE(fs::exists(dir.path / "summary.json"));
    EXPECT_TRUE(fs::exists(dir.path / "manifest.json"));
}

TEST(EmitReport, EmptyResultsLeaveNoFiles) {
    const TempDir dir;
    EXPECT_THROW(emit_report(small_scenario(), {}, {}, dir.path), EmptyInput);
    EXPECT_FALSE(fs::exists(dir.path));
}

TEST(EmitReport, UnwritableDirectoryNamesThePath) {
    const TempDir dir;
    fs::create_directories(dir.path);
    const fs::path blocker = dir.path / "file";
    std::ofstream(blocker) << "x";
    try {
        emit_report(small_scenario(), {SuccessMetrics{}}, {row(0, EstimatorKind::LeastSquares, 0.1, false)},
                    blocker / "out");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos) << e.what();
    }
}

TEST(ParseResultsCsv, RejectsBadHeader) {
    std::istringstream in("point,trial\n0,1\n");
    EXPECT_THROW(parse_results_csv(in), ParseError);
}

TEST(ScenarioConfig, BundledScenariosParse) {
    for (const char* name : {"ieee14_sensor_bias.json", "ieee14_state_targeted.json"}) {
        const ScenarioConfig cfg = load_scenario_config(std::string(RESEST_DATA_DIR) + "/scenarios/" + name);
        EXPECT_EQ(cfg.trials, 200) << name;
        EXPECT_EQ(cfg.estimators.size(), 3u) << name;
        EXPECT_EQ(cfg.grid.buses.size(), 14u) << name;
    }
}

TEST(ScenarioConfig, ErrorsNameTheField) {
    const auto expect_field = [](const std::string& text, const std::string& field) {
        try {
            parse_scenario_config(text, RESEST_DATA_DIR);
            ADD_FAILURE() << "expected ConfigError for " << field;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
        }
    };
    const std::string grid = R"("grid": "grids/tri3.json", "attack": {"kind": "sensor-bias", "sweep": [10]})";
    expect_field("{" + grid + R"(, "trials": 0})", "config.trials");
    expect_field("{" + grid + R"(, "gpr": {"lengthscale": -1}})", "config.gpr.lengthscale");
    expect_field("{" + grid + R"(, "decoder": {"tau": 1.5}})", "config.decoder.tau");
    expect_field(R"({"grid": "grids/tri3.json", "attack": {"kind": "sensor-bias", "sweep": [120]}})",
                 "config.attack.sweep[0]");
    expect_field("{" + grid + R"(, "estimators": ["kalman"]})", "config.estimators");
    expect_field("{" + grid + R"(, "mystery": 1})", "mystery");
}

TEST(ScenarioConfig, JsonEchoReparses) {
    const ScenarioConfig cfg = load_scenario_config(std::string(RESEST_DATA_DIR) + "/scenarios/ieee14_sensor_bias.json");
    const std::string echo = scenario_config_json(cfg);
    EXPECT_NE(echo.find("ieee14-dc-sensor-bias"), std::string::npos);
    EXPECT_NE(echo.find("\"seed\""), std::string::npos);
}
