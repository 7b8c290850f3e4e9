#pragma once

#include "resest/measurement_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace resest {

struct GridLine {
    int from = 0;  // bus id
    int to = 0;    // bus id
    double b = 0.0;  // series susceptance
};

enum class SensorKind { Flow, Injection };

struct GridSensor {
    SensorKind kind = SensorKind::Flow;
    int target = 0;        // line index for flows, bus id for injections
    bool reverse = false;  // flow metered at the `to` end
};

/// Bus/branch description of a DC-linearized network plus its sensor layout.
struct GridSpec {
    std::vector<int> buses;
    std::vector<GridLine> lines;
    std::vector<GridSensor> sensors;
    std::optional<int> slack;
    std::vector<double> noise_std;  // empty, one shared value, or one per sensor
};

/// Parses the GridSpec JSON document:
///   {"buses": N | [ids], "lines": [{"from","to","b"}],
///    "sensors": [{"kind": "flow"|"injection", "target", "end"?}],
///    "slack": id, "noise_std"?: s | [s...]}
GridSpec parse_grid_spec(const std::string& json_text);
GridSpec load_grid_spec(const std::string& path);

/// DC measurement matrix over the non-slack bus angles (buses in listed order).
/// A flow sensor on line (i, j) reads b (theta_i - theta_j); an injection is the
/// row sum over incident lines.
Matrix dc_measurement_matrix(const GridSpec& grid);

/// Builds the measurement model; noise falls back to `default_noise_std` when the
/// grid carries none.
MeasurementModel build_dc_grid_model(const GridSpec& grid, double default_noise_std = 0.01);

}  // namespace resest
