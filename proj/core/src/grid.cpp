#include "resest/grid.hpp"

#include "resest/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace resest {
namespace {

using nlohmann::json;

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

template <typename T>
T field(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) {
        throw ConfigError(path + "." + key + ": missing");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path + "." + key + ": " + e.what());
    }
}

std::unordered_map<int, int> bus_positions(const GridSpec& grid) {
    std::unordered_map<int, int> pos;
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        if (!pos.emplace(grid.buses[i], static_cast<int>(i)).second) {
            throw ConfigError("duplicate bus id " + std::to_string(grid.buses[i]));
        }
    }
    return pos;
}

}  // namespace

GridSpec parse_grid_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("grid: invalid JSON: ") + e.what());
    }
    GridSpec grid;
    if (!doc.contains("buses")) {
        throw ConfigError("grid.buses: missing");
    }
    const json& buses = doc["buses"];
    if (buses.is_number_integer()) {
        const int count = buses.get<int>();
        if (count < 1) {
            throw ConfigError("grid.buses: need at least one bus");
        }
        grid.buses.resize(static_cast<std::size_t>(count));
        std::iota(grid.buses.begin(), grid.buses.end(), 1);
    } else if (buses.is_array()) {
        grid.buses = buses.get<std::vector<int>>();
    } else {
        throw ConfigError("grid.buses: expected a count or a list of ids");
    }

    const auto lines = field<json>(doc, "lines", "grid");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string path = "grid.lines[" + std::to_string(i) + "]";
        grid.lines.push_back({field<int>(lines[i], "from", path),
                              field<int>(lines[i], "to", path),
                              field<double>(lines[i], "b", path)});
    }

    const auto sensors = field<json>(doc, "sensors", "grid");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string path = "grid.sensors[" + std::to_string(i) + "]";
        GridSensor s;
        const auto kind = field<std::string>(sensors[i], "kind", path);
        if (kind == "flow") {
            s.kind = SensorKind::Flow;
        } else if (kind == "injection") {
            s.kind = SensorKind::Injection;
        } else {
            throw ConfigError(path + ".kind: unknown sensor kind '" + kind + "'");
        }
        s.target = field<int>(sensors[i], "target", path);
        if (sensors[i].contains("end")) {
            const auto end = field<std::string>(sensors[i], "end", path);
            if (end != "from" && end != "to") {
                throw ConfigError(path + ".end: expected 'from' or 'to'");
            }
            s.reverse = end == "to";
        }
        grid.sensors.push_back(s);
    }

    if (doc.contains("slack") && !doc["slack"].is_null()) {
        grid.slack = field<int>(doc, "slack", "grid");
    }
    if (doc.contains("noise_std")) {
        const json& ns = doc["noise_std"];
        if (ns.is_number()) {
            grid.noise_std = {ns.get<double>()};
        } else {
            grid.noise_std = field<std::vector<double>>(doc, "noise_std", "grid");
        }
    }
    return grid;
}

GridSpec load_grid_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open grid file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_spec(ss.str());
}

Matrix dc_measurement_matrix(const GridSpec& grid) {
    if (!grid.slack) {
        throw ConfigError("grid.slack: no slack bus given");
    }
    const auto pos = bus_positions(grid);
    const auto slack_it = pos.find(*grid.slack);
    if (slack_it == pos.end()) {
        throw ConfigError("grid.slack: bus " + std::to_string(*grid.slack) + " is not listed");
    }
    const int slack_pos = slack_it->second;

    DisjointSets sets(grid.buses.size());
    std::vector<std::pair<int, int>> ends;
    for (std::size_t i = 0; i < grid.lines.size(); ++i) {
        const auto& line = grid.lines[i];
        const auto f = pos.find(line.from);
        const auto t = pos.find(line.to);
        if (f == pos.end() || t == pos.end()) {
            throw ConfigError("grid.lines[" + std::to_string(i) + "]: unknown bus");
        }
        if (f->second == t->second) {
            throw ConfigError("grid.lines[" + std::to_string(i) + "]: self loop");
        }
        if (!std::isfinite(line.b)) {
            throw ConfigError("grid.lines[" + std::to_string(i) + "].b: not finite");
        }
        if (line.b != 0.0) {
            sets.unite(static_cast<std::size_t>(f->second), static_cast<std::size_t>(t->second));
        }
        ends.emplace_back(f->second, t->second);
    }
    const std::size_t root = sets.find(0);
    for (std::size_t i = 1; i < grid.buses.size(); ++i) {
        if (sets.find(i) != root) {
            throw TopologyError("bus " + std::to_string(grid.buses[i]) +
                                " is not connected to the rest of the grid");
        }
    }

    // Column of each bus angle once the slack is removed; -1 for the slack.
    std::vector<int> column(grid.buses.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        if (static_cast<int>(i) != slack_pos) {
            column[i] = next++;
        }
    }

    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(grid.sensors.size()), next);
    auto add = [&](Eigen::Index row, int bus_pos, double value) {
        if (column[static_cast<std::size_t>(bus_pos)] >= 0) {
            h(row, column[static_cast<std::size_t>(bus_pos)]) += value;
        }
    };
    for (std::size_t r = 0; r < grid.sensors.size(); ++r) {
        const auto& s = grid.sensors[r];
        const auto row = static_cast<Eigen::Index>(r);
        if (s.kind == SensorKind::Flow) {
            if (s.target < 0 || static_cast<std::size_t>(s.target) >= grid.lines.size()) {
                throw ConfigError("grid.sensors[" + std::to_string(r) + "].target: no such line");
            }
            const double b = grid.lines[static_cast<std::size_t>(s.target)].b;
            const auto [f, t] = ends[static_cast<std::size_t>(s.target)];
            const double sign = s.reverse ? -1.0 : 1.0;
            add(row, f, sign * b);
            add(row, t, -sign * b);
        } else {
            const auto it = pos.find(s.target);
            if (it == pos.end()) {
                throw ConfigError("grid.sensors[" + std::to_string(r) + "].target: no such bus");
            }
            for (std::size_t l = 0; l < grid.lines.size(); ++l) {
                const auto [f, t] = ends[l];
                const double b = grid.lines[l].b;
                if (f == it->second) {
                    add(row, f, b);
                    add(row, t, -b);
                } else if (t == it->second) {
                    add(row, t, b);
                    add(row, f, -b);
                }
            }
        }
    }
    return h;
}

MeasurementModel build_dc_grid_model(const GridSpec& grid, double default_noise_std) {
    Matrix h = dc_measurement_matrix(grid);
    const auto m = h.rows();
    Vector sigma;
    if (grid.noise_std.empty()) {
        sigma = Vector::Constant(m, default_noise_std);
    } else if (grid.noise_std.size() == 1) {
        sigma = Vector::Constant(m, grid.noise_std.front());
    } else if (static_cast<Eigen::Index>(grid.noise_std.size()) == m) {
        sigma = Eigen::Map<const Vector>(grid.noise_std.data(), m);
    } else {
        throw ConfigError("grid.noise_std: expected 1 or " + std::to_string(m) + " values");
    }
    return MeasurementModel(std::move(h), std::move(sigma));
}

}  // namespace resest
