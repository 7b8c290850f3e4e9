#include "resest/auxiliary_csv.hpp"

#include "resest/errors.hpp"
#include "resest/text_io.hpp"

#include <fstream>
#include <sstream>

namespace resest {

AuxiliarySeries ingest_auxiliary_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    AuxiliarySeries series;
    bool have_header = false;
    std::vector<std::vector<double>> columns;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (!have_header) {
            if (cells.size() < 2 || cells.front() != "timestamp") {
                throw ParseError(line_no, "header must be 'timestamp,<channel>,...'");
            }
            for (std::size_t i = 1; i < cells.size(); ++i) {
                series.channel_names.emplace_back(cells[i]);
            }
            have_header = true;
            continue;
        }
        if (cells.size() != series.channel_names.size() + 1) {
            throw ParseError(line_no, "expected " + std::to_string(series.channel_names.size() + 1) +
                                          " cells, got " + std::to_string(cells.size()));
        }
        if (cells.front().empty()) {
            throw ParseError(line_no, "empty timestamp");
        }
        series.timestamps.emplace_back(cells.front());
        std::vector<double> values;
        values.reserve(cells.size() - 1);
        for (std::size_t i = 1; i < cells.size(); ++i) {
            values.push_back(parse_real(cells[i], line_no));
        }
        columns.push_back(std::move(values));
    }
    if (!have_header) {
        throw EmptyInput("auxiliary CSV is empty");
    }
    if (columns.empty()) {
        throw EmptyInput("auxiliary CSV has a header but no rows");
    }

    const auto p = static_cast<Eigen::Index>(series.channel_names.size());
    series.z.resize(p, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t t = 0; t < columns.size(); ++t) {
        for (Eigen::Index j = 0; j < p; ++j) {
            series.z(j, static_cast<Eigen::Index>(t)) = columns[t][static_cast<std::size_t>(j)];
        }
    }
    return series;
}

AuxiliarySeries ingest_auxiliary_csv(const std::string& text) {
    std::istringstream in(text);
    return ingest_auxiliary_csv(in);
}

AuxiliarySeries ingest_auxiliary_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open auxiliary CSV " + path);
    }
    return ingest_auxiliary_csv(in);
}

void emit_auxiliary_csv(std::ostream& out, const AuxiliarySeries& series) {
    out << "timestamp";
    for (const auto& name : series.channel_names) {
        out << ',' << name;
    }
    out << '\n';
    for (Eigen::Index t = 0; t < series.z.cols(); ++t) {
        out << series.timestamps[static_cast<std::size_t>(t)];
        for (Eigen::Index j = 0; j < series.z.rows(); ++j) {
            out << ',' << format_double(series.z(j, t));
        }
        out << '\n';
    }
}

}  // namespace resest
