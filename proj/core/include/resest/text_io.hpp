#pragma once

#include "resest/types.hpp"

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace resest {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Parses a finite real; throws ParseError(line) on garbage, NaN or Inf.
double parse_real(std::string_view cell, std::size_t line);

/// Splits a CSV line on commas, dropping a trailing '\r'.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Headerless numeric CSV (one matrix row per line).
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv_file(const std::string& path);

}  // namespace resest
