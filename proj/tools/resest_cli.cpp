// resest: Monte-Carlo scenarios, nullspace certificates and single-shot
// resilient estimation from the command line.

#include "resest/auxiliary_csv.hpp"
#include "resest/decoder.hpp"
#include "resest/errors.hpp"
#include "resest/grid.hpp"
#include "resest/harness.hpp"
#include "resest/report_io.hpp"
#include "resest/scenario_config.hpp"
#include "resest/sparsity.hpp"
#include "resest/text_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace resest;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// Either a grid description (has "buses") or {"h": [[...]], "noise_std": s | [...]}.
MeasurementModel load_model(const std::string& path) {
    const std::string text = slurp(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("model: invalid JSON: " + std::string(e.what()));
    }
    if (doc.contains("buses")) {
        return build_dc_grid_model(parse_grid_spec(text));
    }
    if (!doc.contains("h") || !doc["h"].is_array() || doc["h"].empty()) {
        throw ConfigError("model.h: expected a nonempty array of rows");
    }
    std::vector<std::vector<double>> rows;
    try {
        rows = doc["h"].get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model.h: ") + e.what());
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(rows.front().size());
    Matrix h(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
            throw ConfigError("model.h[" + std::to_string(i) + "]: ragged row");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            h(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    Vector sigma = Vector::Constant(m, 0.01);
    if (doc.contains("noise_std")) {
        const auto& ns = doc["noise_std"];
        if (ns.is_number()) {
            sigma.setConstant(ns.get<double>());
        } else {
            const auto v = ns.get<std::vector<double>>();
            if (static_cast<Eigen::Index>(v.size()) != m) {
                throw ConfigError("model.noise_std: expected " + std::to_string(m) + " values");
            }
            sigma = Eigen::Map<const Vector>(v.data(), m);
        }
    }
    return MeasurementModel(std::move(h), std::move(sigma));
}

// A single row or a single column.
Vector load_vector_csv(const std::string& path) {
    const Matrix a = read_matrix_csv_file(path);
    if (a.rows() == 1) {
        return a.row(0).transpose();
    }
    if (a.cols() == 1) {
        return a.col(0);
    }
    throw ShapeError(path + ": expected a single row or column, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
}

struct SimulateArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string estimators;
    std::optional<int> workers;
    std::string format = "csv";
};

int run_simulate(const SimulateArgs& a) {
    ScenarioConfig cfg = load_scenario_config(a.config);
    if (a.seed) {
        cfg.seed = *a.seed;
    }
    if (a.trials) {
        cfg.trials = *a.trials;
    }
    if (a.workers) {
        cfg.workers = *a.workers;
    }
    if (!a.estimators.empty()) {
        cfg.estimators.clear();
        for (const auto& name : split_list(a.estimators)) {
            cfg.estimators.push_back(parse_estimator(name));
        }
    }
    validate_scenario_config(cfg);
    const auto results = run_monte_carlo(cfg);
    const auto metrics = summarize(results);
    const auto files =
        emit_report(cfg, metrics, results, a.out, a.format == "json" ? ReportFormat::Json : ReportFormat::Csv);

    std::printf("%-8s %-20s %8s %10s %10s\n", "sweep", "estimator", "success", "median", "tgt-med");
    for (const auto& s : metrics) {
        std::printf("%-8g %-20s %7.1f%% %10.4g %10.4g\n", s.sweep_value, std::string(to_string(s.estimator)).c_str(),
                    100.0 * s.success_rate, s.error_quantiles[2], s.target_quantiles[2]);
    }
    for (const auto& p : files.written) {
        std::printf("wrote %s\n", p.string().c_str());
    }
    return kOk;
}

struct CertifyArgs {
    std::string matrix;
    int k = 1;
    double gamma = 1.0;
    int q = 1;
    bool from_h = false;
    bool sampled = false;
    int samples = 10000;
    std::uint64_t seed = 0x5eed;
};

int run_certify(const CertifyArgs& a) {
    const Matrix input = read_matrix_csv_file(a.matrix);
    Matrix mat = input;
    std::optional<QrFactors> qr;
    if (a.from_h) {
        qr = qr_split(input);
        mat = residual_projector(*qr);
    }
    NspOptions opts;
    opts.seed = a.seed;
    opts.samples = a.samples;
    const NspCertificate cert =
        a.sampled ? nsp_sampled_falsifier(mat, a.k, a.gamma, a.q, opts) : nsp_check(mat, a.k, a.gamma, a.q, opts);

    auto doc = nlohmann::ordered_json::parse(to_json(cert));
    const int m = static_cast<int>(mat.cols());
    if (a.gamma > 0.0 && a.gamma < 1.0) {
        doc["max_correctable_errors"] = max_correctable_errors(a.gamma, a.q, m);
    }
    if (qr) {
        // Both conditions certify NSP_1(k, 1) whatever --q is; the block norm uses q = 2.
        doc["sufficient_thm"] = nsp_sufficient_thm(qr->q1, a.k, 2);
        doc["sufficient_corollary"] = nsp_sufficient_corollary(qr->q1, a.k);
    }
    std::cout << doc.dump(2) << "\n";
    return kOk;
}

struct DecodeArgs {
    std::string model;
    std::string measurements;
    double tau = 0.95;
    std::optional<double> damping;
    int max_iters = 10;
    bool no_noise_constraint = false;
    bool predictive_prior = false;
    std::string auxiliary;  // historical auxiliary series (training inputs)
    std::string history;    // historical attack-free measurements, N x m
    std::string z;          // current auxiliary values, comma separated
    double amplitude = 1.0;
    double lengthscale = 1.0;
    double gpr_noise = 0.01;
};

int run_decode(const DecodeArgs& a) {
    const MeasurementModel model = load_model(a.model);
    const Vector y = load_vector_csv(a.measurements);
    if (y.size() != model.measurements()) {
        throw ShapeError("measurements: expected " + std::to_string(model.measurements()) + " values, got " +
                         std::to_string(y.size()));
    }
    DecoderConfig cfg;
    cfg.tau = a.tau;
    cfg.damping = a.damping;
    cfg.max_reweight_iters = a.max_iters;
    cfg.noise_constraint = !a.no_noise_constraint;
    cfg.predictive_prior = a.predictive_prior;

    const bool with_prior = !a.auxiliary.empty() || !a.history.empty() || !a.z.empty();
    EstimateReport report;
    if (with_prior) {
        if (a.auxiliary.empty() || a.history.empty() || a.z.empty()) {
            throw ConfigError("decode: --auxiliary, --history and --z must be given together");
        }
        const AuxiliarySeries aux = ingest_auxiliary_csv_file(a.auxiliary);
        const Matrix hist = read_matrix_csv_file(a.history);
        if (hist.rows() != aux.samples() || hist.cols() != model.measurements()) {
            throw ShapeError("history: expected " + std::to_string(aux.samples()) + "x" +
                             std::to_string(model.measurements()) + " values");
        }
        const auto cells = split_list(a.z);
        Vector z(static_cast<Eigen::Index>(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            z(static_cast<Eigen::Index>(i)) = parse_real(cells[i], 1);
        }
        TrainOptions topts;
        topts.center_targets = true;
        const GprModel gpr = GprModel::train(
            aux.z, hist.transpose(),
            KernelParams{a.amplitude, a.lengthscale, Vector::Constant(model.measurements(), a.gpr_noise)}, topts);
        report = resilient_estimate(model, gpr, z, y, cfg);
    } else {
        report = reweighted_l1(model, y, std::nullopt, cfg);
    }
    std::cout << to_json(report) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resilient state estimation under sparse sensor attacks"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo scenario and write report tables");
    simulate->add_option("--config", sim.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--seed", sim.seed, "Override the master seed");
    simulate->add_option("--trials", sim.trials, "Override trials per sweep point");
    simulate->add_option("--estimators", sim.estimators, "Comma list of least-squares,reweighted-l1,reweighted-l1-prior");
    simulate->add_option("--workers", sim.workers, "Worker threads (0 = all cores)");
    simulate->add_option("--format", sim.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

    CertifyArgs cert;
    auto* certify = app.add_subcommand("certify", "Test the nullspace property of a matrix");
    certify->add_option("--matrix", cert.matrix, "Headerless CSV matrix")->required()->check(CLI::ExistingFile);
    certify->add_option("--k", cert.k, "Support size")->required();
    certify->add_option("--gamma", cert.gamma, "NSP constant")->required();
    certify->add_option("--q", cert.q, "Norm index")->check(CLI::IsMember({1, 2}));
    certify->add_flag("--from-h", cert.from_h, "Matrix is H; certify its residual projector");
    certify->add_flag("--sampled", cert.sampled, "Only run the random falsifier");
    certify->add_option("--samples", cert.samples, "Falsifier directions");
    certify->add_option("--seed", cert.seed, "Falsifier seed");

    DecodeArgs dec;
    auto* decode = app.add_subcommand("decode", "Estimate the state from one measurement vector");
    decode->add_option("--model", dec.model, "Grid JSON or {h, noise_std} JSON")->required()->check(CLI::ExistingFile);
    decode->add_option("--measurements", dec.measurements, "CSV row or column")->required()->check(CLI::ExistingFile);
    decode->add_option("--tau", dec.tau, "Ellipsoid confidence level");
    decode->add_option("--damping", dec.damping, "Re-weighting offset");
    decode->add_option("--max-iters", dec.max_iters, "Re-weighting iterations");
    decode->add_flag("--no-noise-constraint", dec.no_noise_constraint, "Drop the noise ellipsoid");
    decode->add_flag("--predictive-prior", dec.predictive_prior, "Add the GPR noise variance to the prior spread");
    decode->add_option("--auxiliary", dec.auxiliary, "Historical auxiliary CSV (timestamp,channels...)");
    decode->add_option("--history", dec.history, "Historical attack-free measurements, one row per sample");
    decode->add_option("--z", dec.z, "Current auxiliary values, comma separated");
    decode->add_option("--amplitude", dec.amplitude, "Kernel amplitude");
    decode->add_option("--lengthscale", dec.lengthscale, "Kernel lengthscale");
    decode->add_option("--gpr-noise", dec.gpr_noise, "GPR observation noise std");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*simulate) {
            return run_simulate(sim);
        }
        if (*certify) {
            return run_certify(cert);
        }
        return run_decode(dec);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}
