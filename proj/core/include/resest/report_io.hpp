#pragma once

#include "resest/decoder.hpp"
#include "resest/harness.hpp"
#include "resest/sparsity.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace resest {

std::string_view library_version();

enum class ReportFormat { Csv, Json };

/// Files written by emit_report, in the order they were committed.
struct ReportFiles {
    std::vector<std::filesystem::path> written;
};

/// Long-format tables. Wall times go to timings.csv so that results.csv and
/// summary.csv depend only on (config, seed).
std::string results_csv(const std::vector<TrialResult>& results);
std::string timings_csv(const std::vector<TrialResult>& results);
std::string summary_csv(const std::vector<SuccessMetrics>& metrics);
std::string results_json(const std::vector<TrialResult>& results);
std::string summary_json(const std::vector<SuccessMetrics>& metrics);
std::string manifest_json(const ScenarioConfig& cfg);

/// Writes results, summary, timings and manifest into dir. Throws EmptyInput
/// before touching the filesystem; every file is staged under a temporary
/// name and renamed only once all of them were written. IoError names the path.
ReportFiles emit_report(const ScenarioConfig& cfg, const std::vector<SuccessMetrics>& metrics,
                        const std::vector<TrialResult>& results, const std::filesystem::path& dir,
                        ReportFormat format = ReportFormat::Csv);

/// Inverse of results_csv (wall_ms left at 0).
std::vector<TrialResult> parse_results_csv(std::istream& in);

/// Reads results.csv from dir and fills wall_ms from timings.csv when present.
std::vector<TrialResult> read_results(const std::filesystem::path& dir);

std::string to_json(const EstimateReport& report);
std::string to_json(const NspCertificate& cert);

}  // namespace resest
