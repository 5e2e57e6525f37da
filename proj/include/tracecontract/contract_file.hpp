#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracecontract/contract.hpp"
#include "tracecontract/parser.hpp"

namespace tracecontract {

/// A contract file problem, located by 1-based line and a column span on the
/// (placeholder-expanded) line text.
class ContractError : public std::runtime_error {
 public:
  enum class Kind { lexical, syntax, structure };

  ContractError(Kind kind, std::size_t line, SourceSpan columns, std::string line_text, const std::string& message)
      : std::runtime_error(message),
        kind_(kind),
        line_(line),
        columns_(columns),
        line_text_(std::move(line_text)) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const SourceSpan& columns() const { return columns_; }
  const std::string& line_text() const { return line_text_; }

  /// "line 3, columns 18-19: message" followed by the line and a caret.
  /// Line 0 marks errors about the contract as a whole.
  std::string render() const {
    if (line_ == 0) return what();  // contract-wide, no source location
    return "line " + std::to_string(line_) + ", columns " + std::to_string(columns_.start + 1) + "-" +
           std::to_string(columns_.end) + ": " + what() + "\n" + caret_line(line_text_, columns_);
  }

 private:
  Kind kind_;
  std::size_t line_;
  SourceSpan columns_;
  std::string line_text_;
};

/// The shipped seven-coordinate contract. `{tol}` expands to the tolerance,
/// `{silence}` to the silence radius, and `{2tol}` style prefixes scale them.
inline const char* default_contract_source() {
  return R"(# Boundary contract: five frame clauses and two event clauses.
set tolerance = 0.04
set silence_ratio = 0.5
set merge_gap = 0
set matcher = greedy
frame onset_guard : ref_onset -> N[{tol}] pred_onset @ ref_onset
frame offset_guard : ref_offset -> N[{tol}] pred_offset @ ref_offset
frame missing_guard : ref_active -> N[{tol}] pred_active @ ref_active
frame spurious_guard : pred_active -> N[{tol}] ref_active @ pred_active
frame silence_guard : pred_active -> N[{silence}] ref_active @ pred_active
event duration_guard : duration_within @ matched_pairs max_diff={2tol}
event fragmentation_guard : singly_covered @ reference_intervals
)";
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string expand_placeholders(const std::string& line, double tolerance, double silence,
                                       std::size_t line_no) {
  static const std::regex placeholder(R"(\{([0-9]*\.?[0-9]*)(tol|silence)\})");
  std::string out;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(line.begin(), line.end(), placeholder); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(line, last, static_cast<std::size_t>(m.position()) - last);
    double factor = 1.0;
    if (m[1].length() > 0) {
      auto f = parse_number(m[1].str());
      if (!f)
        throw ContractError(ContractError::Kind::lexical, line_no,
                            {static_cast<std::size_t>(m.position()), static_cast<std::size_t>(m.position() + m.length())},
                            line, "malformed placeholder factor '" + m[1].str() + "'");
      factor = *f;
    }
    out += format_decimal(factor * (m[2] == "tol" ? tolerance : silence));
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.append(line, last, std::string::npos);
  return out;
}

inline bool valid_name(std::string_view s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  for (char c : s)
    if (!is_ident_body(c)) return false;
  return true;
}

// Offset of the first non-space character at or after pos.
inline std::size_t skip_space(const std::string& s, std::size_t pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  return pos;
}

inline Formula parse_embedded(const std::string& line, std::size_t begin, std::size_t end, std::size_t line_no) {
  const std::string_view text = std::string_view(line).substr(begin, end - begin);
  auto shift = [begin](SourceSpan s) { return SourceSpan{s.start + begin, s.end + begin}; };
  try {
    return parse_formula(text);
  } catch (const LexError& e) {
    throw ContractError(ContractError::Kind::lexical, line_no, shift(e.span()), line, e.what());
  } catch (const ParseError& e) {
    throw ContractError(ContractError::Kind::syntax, line_no, shift(e.span()), line, e.what());
  }
}

}  // namespace detail

/// Parses contract text. Settings lines (`set key = value`) are read first;
/// placeholders in clause lines are then expanded with the effective
/// tolerance (the override when given), and every formula is tokenized and
/// parsed anew.
inline Contract parse_contract(std::string_view text, std::optional<double> tolerance_override = std::nullopt) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t nl = text.find('\n', start);
      const std::size_t stop = nl == std::string_view::npos ? text.size() : nl;
      std::string line(text.substr(start, stop - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }
  auto strip_comment = [](const std::string& l) {
    const auto hash = l.find('#');
    return hash == std::string::npos ? l : l.substr(0, hash);
  };
  auto structure_error = [&](std::size_t line_no, SourceSpan cols, const std::string& msg) {
    return ContractError(ContractError::Kind::structure, line_no, cols, lines[line_no - 1], msg);
  };

  Contract contract;
  auto& s = contract.settings;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string body = strip_comment(lines[k]);
    const std::size_t b = detail::skip_space(body, 0);
    if (body.compare(b, 4, "set ") != 0) continue;
    const auto eq = body.find('=', b);
    if (eq == std::string::npos) throw structure_error(k + 1, {b, body.size()}, "expected 'set <key> = <value>'");
    const std::string key = detail::trim(std::string_view(body).substr(b + 4, eq - b - 4));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    const SourceSpan vspan{eq + 1, std::max(eq + 2, body.size())};
    if (key == "matcher") {
      try {
        s.matcher = parse_policy(value);
      } catch (const std::invalid_argument& e) {
        throw structure_error(k + 1, vspan, e.what());
      }
      continue;
    }
    const auto v = detail::parse_number(value);
    if (!v) throw structure_error(k + 1, vspan, "expected a number for '" + key + "'");
    if (key == "tolerance") s.tolerance = *v;
    else if (key == "silence_ratio") s.silence_ratio = *v;
    else if (key == "merge_gap") s.merge_gap = *v;
    else if (key == "soft_scale") s.soft_scale = *v;
    else if (key == "exact_bound") s.exact_bound = static_cast<std::size_t>(*v);
    else throw structure_error(k + 1, {b + 4, eq}, "unknown setting '" + key + "'");
  }
  if (tolerance_override) s.tolerance = *tolerance_override;
  if (!(s.tolerance > 0.0))
    throw ContractError(ContractError::Kind::structure, 0, {0, 1}, "", "tolerance must be positive");

  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    const std::string raw = strip_comment(lines[k]);
    const std::size_t b = detail::skip_space(raw, 0);
    if (b == raw.size() || raw.compare(b, 4, "set ") == 0) continue;

    const std::string line = detail::expand_placeholders(raw, s.tolerance, s.silence_ratio * s.tolerance, line_no);
    lines[k] = line;  // diagnostics show the expanded text
    const std::size_t kw_end = line.find_first_of(" \t", b);
    const std::string keyword = line.substr(b, kw_end == std::string::npos ? std::string::npos : kw_end - b);
    if (keyword != "frame" && keyword != "event")
      throw structure_error(line_no, {b, b + keyword.size()}, "expected 'frame', 'event' or 'set'");
    const auto colon = line.find(':', b);
    const auto at = line.find('@', b);
    if (colon == std::string::npos) throw structure_error(line_no, {b, line.size()}, "missing ':' after clause name");
    if (at == std::string::npos || at < colon)
      throw structure_error(line_no, {colon, line.size()}, "missing '@' before the obligation");
    const std::string name = detail::trim(std::string_view(line).substr(kw_end, colon - kw_end));
    if (!detail::valid_name(name)) throw structure_error(line_no, {kw_end, colon}, "invalid clause name '" + name + "'");
    if (contract.find(name)) throw structure_error(line_no, {kw_end, colon}, "duplicate clause name '" + name + "'");

    if (keyword == "frame") {
      FrameClause fc;
      fc.name = name;
      fc.formula = detail::parse_embedded(line, colon + 1, at, line_no);
      fc.obligation = detail::parse_embedded(line, at + 1, line.size(), line_no);
      fc.formula_text = detail::trim(std::string_view(line).substr(colon + 1, at - colon - 1));
      fc.obligation_text = detail::trim(std::string_view(line).substr(at + 1));
      contract.clauses.emplace_back(std::move(fc));
      continue;
    }

    EventClause ec;
    ec.name = name;
    const std::string pred = detail::trim(std::string_view(line).substr(colon + 1, at - colon - 1));
    if (pred == "duration_within") ec.predicate = EventPredicate::duration_within;
    else if (pred == "singly_covered") ec.predicate = EventPredicate::singly_covered;
    else if (pred == "latency_window") ec.predicate = EventPredicate::latency_window;
    else if (pred == "overlap_purity") ec.predicate = EventPredicate::overlap_purity;
    else throw structure_error(line_no, {colon + 1, at}, "unknown event predicate '" + pred + "'");

    // obligation name followed by key=value parameters
    std::size_t pos = detail::skip_space(line, at + 1);
    std::size_t stop = line.find_first_of(" \t", pos);
    if (stop == std::string::npos) stop = line.size();
    const std::string obl = line.substr(pos, stop - pos);
    if (obl == "matched_pairs") ec.obligation = EventObligation::matched_pairs;
    else if (obl == "reference_intervals") ec.obligation = EventObligation::reference_intervals;
    else if (obl == "predicted_intervals") ec.obligation = EventObligation::predicted_intervals;
    else throw structure_error(line_no, {pos, std::max(stop, pos + 1)}, "unknown event obligation '" + obl + "'");
    if (ec.obligation != required_obligation(ec.predicate))
      throw structure_error(line_no, {pos, stop},
                            std::string("predicate ") + to_string(ec.predicate) + " requires obligation " +
                                to_string(required_obligation(ec.predicate)));
    pos = detail::skip_space(line, stop);
    while (pos < line.size()) {
      stop = line.find_first_of(" \t", pos);
      if (stop == std::string::npos) stop = line.size();
      const std::string item = line.substr(pos, stop - pos);
      const auto eq = item.find('=');
      const auto v = eq == std::string::npos ? std::nullopt : detail::parse_number(item.substr(eq + 1));
      if (!v || !(*v > 0.0))
        throw structure_error(line_no, {pos, stop}, "expected key=value with a positive value, found '" + item + "'");
      ec.params[item.substr(0, eq)] = *v;
      pos = detail::skip_space(line, stop);
    }
    contract.clauses.emplace_back(std::move(ec));
  }

  try {
    contract.validate();
  } catch (const std::invalid_argument& e) {
    throw ContractError(ContractError::Kind::structure, 0, {0, 1}, "", e.what());
  }
  return contract;
}

inline Contract default_contract(double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  return parse_contract(default_contract_source(), tolerance);
}

/// Canonical rendering of a contract with all formulas re-printed.
inline std::string render_contract(const Contract& c) {
  std::string out;
  const auto& s = c.settings;
  out += "set tolerance = " + format_decimal(s.tolerance) + "\n";
  out += "set silence_ratio = " + format_decimal(s.silence_ratio) + "\n";
  out += "set merge_gap = " + format_decimal(s.merge_gap) + "\n";
  out += std::string("set matcher = ") + to_string(s.matcher) + "\n";
  for (const auto& clause : c.clauses) {
    if (const auto* f = std::get_if<FrameClause>(&clause)) {
      out += "frame " + f->name + " : " + format(f->formula) + " @ " + format(f->obligation) + "\n";
      continue;
    }
    const auto& e = std::get<EventClause>(clause);
    out += "event " + e.name + " : " + to_string(e.predicate) + " @ " + to_string(e.obligation);
    for (const auto& [k, v] : e.params) out += " " + k + "=" + format_decimal(v);
    out += "\n";
  }
  return out;
}

}  // namespace tracecontract
