#pragma once

// Report writers. Numbers use the shortest round-trip decimal so reruns on
// equal inputs produce equal bytes.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tracecontract/parser.hpp"

namespace tracecontract::io {

inline std::string num(double v) { return format_decimal(v); }
inline std::string num(std::size_t v) { return std::to_string(v); }
inline std::string num(const std::optional<double>& v) { return v ? format_decimal(*v) : std::string(); }

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ',';
    out += csv_cell(cells[k]);
  }
  return out + '\n';
}

}  // namespace tracecontract::io
