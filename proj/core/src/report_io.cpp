#include "resest/report_io.hpp"

#include "resest/errors.hpp"
#include "resest/text_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#ifndef RESEST_VERSION
#define RESEST_VERSION "0.0.0"
#endif

namespace resest {
namespace {

using nlohmann::ordered_json;

// Non-finite values appear as inf, -inf or nan so the tables stay numeric.
std::string cell(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return format_double(v);
}

double parse_cell(std::string_view s, std::size_t line) {
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return parse_real(s, line);
}

int parse_int(std::string_view s, std::size_t line) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(line, "not an integer: '" + std::string(s) + "'");
    }
    return v;
}

// JSON has no infinity; such values are written as strings.
ordered_json number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return cell(v);
}

ordered_json vector_json(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(number(v(i)));
    }
    return a;
}

const char* const kResultsHeader =
    "point,sweep_value,trial,estimator,attacked,status,rel_error,max_abs_rel_error,target_rel_errors,success";

std::string quantile_header(const char* prefix) {
    std::string h;
    for (const char* q : {"min", "q25", "median", "q75", "max"}) {
        h += std::string(",") + prefix + "_" + q;
    }
    return h;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view library_version() { return RESEST_VERSION; }

std::string results_csv(const std::vector<TrialResult>& results) {
    std::string out = std::string(kResultsHeader) + "\n";
    for (const auto& r : results) {
        std::string targets;
        for (std::size_t i = 0; i < r.target_rel_errors.size(); ++i) {
            targets += (i ? ";" : "") + cell(r.target_rel_errors[i]);
        }
        out += std::to_string(r.point) + "," + cell(r.sweep_value) + "," + std::to_string(r.trial) + "," +
               std::string(to_string(r.estimator)) + "," + std::to_string(r.attacked) + "," + r.status + "," +
               cell(r.rel_error) + "," + cell(r.max_abs_rel_error) + "," + targets + "," +
               (r.success ? "1" : "0") + "\n";
    }
    return out;
}

std::string timings_csv(const std::vector<TrialResult>& results) {
    std::string out = "point,trial,estimator,wall_ms\n";
    for (const auto& r : results) {
        out += std::to_string(r.point) + "," + std::to_string(r.trial) + "," + std::string(to_string(r.estimator)) +
               "," + cell(r.wall_ms) + "\n";
    }
    return out;
}

std::string summary_csv(const std::vector<SuccessMetrics>& metrics) {
    std::string out = "point,sweep_value,estimator,trials,successes,success_rate" + quantile_header("rel_error") +
                      quantile_header("target_rms") + "\n";
    for (const auto& s : metrics) {
        out += std::to_string(s.point) + "," + cell(s.sweep_value) + "," + std::string(to_string(s.estimator)) + "," +
               std::to_string(s.trials) + "," + std::to_string(s.successes) + "," + cell(s.success_rate);
        for (double q : s.error_quantiles) {
            out += "," + cell(q);
        }
        for (double q : s.target_quantiles) {
            out += "," + cell(q);
        }
        out += "\n";
    }
    return out;
}

std::string results_json(const std::vector<TrialResult>& results) {
    ordered_json a = ordered_json::array();
    for (const auto& r : results) {
        ordered_json t = ordered_json::array();
        for (double v : r.target_rel_errors) {
            t.push_back(number(v));
        }
        a.push_back({{"point", r.point},
                     {"sweep_value", number(r.sweep_value)},
                     {"trial", r.trial},
                     {"estimator", to_string(r.estimator)},
                     {"attacked", r.attacked},
                     {"status", r.status},
                     {"rel_error", number(r.rel_error)},
                     {"max_abs_rel_error", number(r.max_abs_rel_error)},
                     {"target_rel_errors", t},
                     {"success", r.success}});
    }
    return a.dump(2) + "\n";
}

std::string summary_json(const std::vector<SuccessMetrics>& metrics) {
    ordered_json a = ordered_json::array();
    for (const auto& s : metrics) {
        ordered_json eq = ordered_json::array();
        ordered_json tq = ordered_json::array();
        for (double q : s.error_quantiles) {
            eq.push_back(number(q));
        }
        for (double q : s.target_quantiles) {
            tq.push_back(number(q));
        }
        a.push_back({{"point", s.point},
                     {"sweep_value", number(s.sweep_value)},
                     {"estimator", to_string(s.estimator)},
                     {"trials", s.trials},
                     {"successes", s.successes},
                     {"success_rate", number(s.success_rate)},
                     {"rel_error_quantiles", eq},
                     {"target_rms_quantiles", tq}});
    }
    return a.dump(2) + "\n";
}

std::string manifest_json(const ScenarioConfig& cfg) {
    ordered_json m;
    m["name"] = cfg.name;
    m["seed"] = cfg.seed;
    m["trials"] = cfg.trials;
    m["success_threshold"] = cfg.success_threshold;
    m["success_rule"] = "rel_error = |x_hat - x*|_2 / |x*|_2 <= success_threshold";
    m["quantile_method"] = "linear interpolation between order statistics (type 7)";
    m["attack_direction"] = "independent random sign per attacked channel";
    m["state_targeted_bias"] = "fraction of the true state at each targeted bus";
    m["versions"] = {{"resest", RESEST_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
    m["config"] = ordered_json::parse(scenario_config_json(cfg));
    return m.dump(2) + "\n";
}

ReportFiles emit_report(const ScenarioConfig& cfg, const std::vector<SuccessMetrics>& metrics,
                        const std::vector<TrialResult>& results, const std::filesystem::path& dir,
                        ReportFormat format) {
    if (results.empty() || metrics.empty()) {
        throw EmptyInput("nothing to report: no trial results");
    }
    std::vector<std::pair<std::string, std::string>> files;
    if (format == ReportFormat::Csv) {
        files.emplace_back("results.csv", results_csv(results));
        files.emplace_back("summary.csv", summary_csv(metrics));
    } else {
        files.emplace_back("results.json", results_json(results));
        files.emplace_back("summary.json", summary_json(metrics));
    }
    files.emplace_back("timings.csv", timings_csv(results));
    files.emplace_back("manifest.json", manifest_json(cfg));

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> staged;
    try {
        for (const auto& [name, text] : files) {
            const auto tmp = dir / (name + ".tmp");
            staged.push_back(tmp);
            write_file(tmp, text);
        }
    } catch (...) {
        for (const auto& p : staged) {
            std::filesystem::remove(p, ec);
        }
        throw;
    }
    ReportFiles out;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto target = dir / files[i].first;
        std::filesystem::rename(staged[i], target, ec);
        if (ec) {
            throw IoError("cannot move " + staged[i].string() + " to " + target.string() + ": " + ec.message());
        }
        out.written.push_back(target);
    }
    return out;
}

std::vector<TrialResult> parse_results_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) {
        throw EmptyInput("results table is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kResultsHeader) {
        throw ParseError(lineno, "unexpected results header");
    }
    std::vector<TrialResult> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto c = split_csv_line(line);
        if (c.size() != 10) {
            throw ParseError(lineno, "expected 10 columns, got " + std::to_string(c.size()));
        }
        TrialResult r;
        r.point = parse_int(c[0], lineno);
        r.sweep_value = parse_cell(c[1], lineno);
        r.trial = parse_int(c[2], lineno);
        try {
            r.estimator = parse_estimator(c[3]);
        } catch (const ConfigError& e) {
            throw ParseError(lineno, e.what());
        }
        r.attacked = parse_int(c[4], lineno);
        r.status = std::string(c[5]);
        r.rel_error = parse_cell(c[6], lineno);
        r.max_abs_rel_error = parse_cell(c[7], lineno);
        std::string_view t = c[8];
        while (!t.empty()) {
            const auto semi = t.find(';');
            r.target_rel_errors.push_back(parse_cell(t.substr(0, semi), lineno));
            t = semi == std::string_view::npos ? std::string_view{} : t.substr(semi + 1);
        }
        if (c[9] != "0" && c[9] != "1") {
            throw ParseError(lineno, "success flag must be 0 or 1");
        }
        r.success = c[9] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<TrialResult> read_results(const std::filesystem::path& dir) {
    std::istringstream results(read_file(dir / "results.csv"));
    auto out = parse_results_csv(results);
    const auto timings_path = dir / "timings.csv";
    if (!std::filesystem::exists(timings_path)) {
        return out;
    }
    std::unordered_map<std::string, double> wall;
    std::istringstream timings(read_file(timings_path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(timings, line)) {
        if (++lineno == 1 || line.empty()) {
            continue;
        }
        const auto c = split_csv_line(line);
        if (c.size() != 4) {
            throw ParseError(lineno, "expected 4 columns in timings.csv");
        }
        wall[std::string(c[0]) + "," + std::string(c[1]) + "," + std::string(c[2])] = parse_cell(c[3], lineno);
    }
    for (auto& r : out) {
        const auto it = wall.find(std::to_string(r.point) + "," + std::to_string(r.trial) + "," +
                                  std::string(to_string(r.estimator)));
        if (it != wall.end()) {
            r.wall_ms = it->second;
        }
    }
    return out;
}

std::string to_json(const EstimateReport& report) {
    ordered_json j;
    j["status"] = to_string(report.status);
    j["x_hat"] = vector_json(report.x_hat);
    j["eps_hat"] = vector_json(report.eps_hat);
    j["e_hat"] = vector_json(report.e_hat);
    j["support"] = report.support;
    j["iterations"] = report.iterations;
    ordered_json trace = ordered_json::array();
    for (double v : report.objective_trace) {
        trace.push_back(number(v));
    }
    j["objective_trace"] = trace;
    j["damping"] = number(report.damping);
    return j.dump(2);
}

std::string to_json(const NspCertificate& cert) {
    ordered_json j;
    j["k"] = cert.k;
    j["gamma"] = number(cert.gamma);
    j["q"] = cert.q;
    j["holds"] = cert.holds;
    j["method"] = to_string(cert.method);
    j["exact"] = cert.is_exact();
    j["worst_ratio"] = number(cert.worst_ratio);
    if (cert.witness) {
        j["witness"] = vector_json(*cert.witness);
        j["witness_support"] = cert.witness_support;
    } else {
        j["witness"] = nullptr;
    }
    return j.dump(2);
}

}  // namespace resest
