#pragma once

#include "resest/types.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace resest {

/// Time-indexed auxiliary channels (prices, loads, ...). Column t of `z` holds
/// the p channel values observed at `timestamps[t]`.
struct AuxiliarySeries {
    std::vector<std::string> timestamps;
    Matrix z;  // p x N
    std::vector<std::string> channel_names;

    int channels() const noexcept { return static_cast<int>(z.rows()); }
    int samples() const noexcept { return static_cast<int>(z.cols()); }
};

/// Reads `timestamp,<name1>,...,<namep>` CSV. CRLF and a trailing newline are
/// accepted; NaN/Inf cells are rejected.
AuxiliarySeries ingest_auxiliary_csv(std::istream& in);
AuxiliarySeries ingest_auxiliary_csv(const std::string& text);
AuxiliarySeries ingest_auxiliary_csv_file(const std::string& path);

/// Writes the same format; values use the shortest round-trip representation.
void emit_auxiliary_csv(std::ostream& out, const AuxiliarySeries& series);

}  // namespace resest
