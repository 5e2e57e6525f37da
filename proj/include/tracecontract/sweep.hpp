#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracecontract/contract_file.hpp"

namespace tracecontract {

/// Default tolerance grid, seconds.
inline const std::vector<double>& default_tolerance_grid() {
  static const std::vector<double> grid{0.02, 0.04, 0.08, 0.12, 0.16};
  return grid;
}

struct SweepRow {
  double tolerance = 0.0;
  Contract contract;  // the contract re-parsed at this tolerance
  MonitorResult result;
  double mean_logic = 0.0;
};

/// Trapezoid area and vertical span of one coordinate across the sweep.
struct SweepSummary {
  double integral = 0.0;
  double span = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::map<std::string, SweepSummary> per_coordinate;
  SweepSummary mean_logic;
};

inline SweepSummary summarize(const std::vector<double>& xs, const std::vector<double>& ys) {
  SweepSummary s;
  if (ys.empty()) return s;
  for (std::size_t k = 1; k < xs.size(); ++k) s.integral += 0.5 * (ys[k] + ys[k - 1]) * (xs[k] - xs[k - 1]);
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  s.span = *hi - *lo;
  return s;
}

/// Re-instantiates the contract text at each tolerance (placeholders expanded,
/// formulas tokenized and parsed again) and monitors the same masks.
inline SweepResult tolerance_sweep(std::string_view contract_source, const Mask& ref, const Mask& pred,
                                   double frame_step, const std::vector<double>& tolerances) {
  for (std::size_t k = 0; k < tolerances.size(); ++k) {
    if (!(tolerances[k] > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (k > 0 && !(tolerances[k] > tolerances[k - 1])) throw std::invalid_argument("tolerances must be ascending");
  }
  SweepResult out;
  for (double tol : tolerances) {
    SweepRow row;
    row.tolerance = tol;
    row.contract = parse_contract(contract_source, tol);
    row.result = monitor(row.contract, ref, pred, frame_step);
    row.mean_logic = row.result.guards.empty() ? 1.0 : tracecontract::mean_logic(row.result.guards);
    out.rows.push_back(std::move(row));
  }
  std::vector<double> xs;
  std::vector<double> means;
  for (const auto& r : out.rows) {
    xs.push_back(r.tolerance);
    means.push_back(r.mean_logic);
  }
  out.mean_logic = summarize(xs, means);
  if (!out.rows.empty()) {
    const auto& first = out.rows.front().result.guards;
    for (std::size_t c = 0; c < first.size(); ++c) {
      std::vector<double> ys;
      for (const auto& r : out.rows) ys.push_back(r.result.guards.coordinates[c].score.score);
      out.per_coordinate[first.coordinates[c].name] = summarize(xs, ys);
    }
  }
  return out;
}

}  // namespace tracecontract
