#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tracecontract/frame_monitor.hpp"

namespace tracecontract {

/// Slack for comparing second-valued quantities that are sums of frame
/// multiples; far below any frame step in use.
inline constexpr double kTimeSlack = 1e-9;

/// Half-open time interval [start, end) in seconds.
struct Interval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline double overlap(const Interval& a, const Interval& b) {
  return std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

/// Maximal runs of active frames as [i h, j h). Runs separated by an
/// inactive gap no longer than `merge_gap` seconds are joined.
inline std::vector<Interval> extract_intervals(const Mask& mask, double frame_step, double merge_gap = 0.0) {
  if (merge_gap < 0.0) throw std::invalid_argument("merge gap must be nonnegative");
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < mask.size();) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < mask.size() && mask[j]) ++j;
    if (!runs.empty() && static_cast<double>(i - runs.back().second) * frame_step <= merge_gap + kTimeSlack)
      runs.back().second = j;
    else
      runs.emplace_back(i, j);
    i = j;
  }
  std::vector<Interval> out;
  out.reserve(runs.size());
  for (auto [i, j] : runs)
    out.push_back({static_cast<double>(i) * frame_step, static_cast<double>(j) * frame_step});
  return out;
}

/// Frame i is active iff [i h, (i+1) h) intersects some interval.
inline Mask rasterize(const std::vector<Interval>& events, std::size_t frame_count, double frame_step) {
  Mask out(frame_count, 0);
  const double total = static_cast<double>(frame_count) * frame_step;
  for (const auto& e : events) {
    if (!(e.start < e.end) || e.start < -kTimeSlack || e.end > total + kTimeSlack)
      throw std::out_of_range("event [" + std::to_string(e.start) + ", " + std::to_string(e.end) +
                              ") outside the trace [0, " + std::to_string(total) + ")");
    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(e.start / frame_step + kTimeSlack)));
    const auto last = static_cast<std::size_t>(std::ceil(e.end / frame_step - kTimeSlack));
    for (std::size_t i = first; i < std::min(last, frame_count); ++i) out[i] = 1;
  }
  return out;
}

struct CandidatePair {
  std::size_t ref = 0;   // index into the reference family
  std::size_t pred = 0;  // index into the prediction family
  Interval ref_interval;
  Interval pred_interval;
  double cost = 0.0;  // |r0-p0| + |r1-p1| - |r ∩ p|
};

inline double match_cost(const Interval& r, const Interval& p) {
  return std::abs(r.start - p.start) + std::abs(r.end - p.end) - overlap(r, p);
}

/// All overlapping pairs with some endpoint within 3 epsilon.
inline std::vector<CandidatePair> candidates(const std::vector<Interval>& refs, const std::vector<Interval>& preds,
                                             double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("tolerance must be positive");
  std::vector<CandidatePair> out;
  const double reach = 3.0 * epsilon + kTimeSlack;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const Interval& r = refs[i];
      const Interval& p = preds[j];
      if (overlap(r, p) <= kTimeSlack) continue;
      if (std::abs(r.start - p.start) > reach && std::abs(r.end - p.end) > reach) continue;
      out.push_back({i, j, r, p, match_cost(r, p)});
    }
  }
  return out;
}

enum class MatcherPolicy { greedy, exact };

inline const char* to_string(MatcherPolicy p) { return p == MatcherPolicy::greedy ? "greedy" : "exact"; }

inline MatcherPolicy parse_policy(const std::string& s) {
  if (s == "greedy") return MatcherPolicy::greedy;
  if (s == "exact") return MatcherPolicy::exact;
  throw std::invalid_argument("unknown matcher policy '" + s + "'");
}

/// One-to-one subset of candidate pairs, sorted by reference index.
struct Matching {
  MatcherPolicy policy = MatcherPolicy::greedy;
  std::vector<CandidatePair> pairs;

  std::size_t size() const { return pairs.size(); }
  double total_cost() const {
    double c = 0.0;
    for (const auto& p : pairs) c += p.cost;
    return c;
  }
  std::vector<std::pair<std::size_t, std::size_t>> index_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& p : pairs) out.emplace_back(p.ref, p.pred);
    return out;
  }
  const CandidatePair* for_ref(std::size_t ref) const {
    for (const auto& p : pairs)
      if (p.ref == ref) return &p;
    return nullptr;
  }
};

namespace detail {
inline void sort_by_ref(std::vector<CandidatePair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return std::pair(a.ref, a.pred) < std::pair(b.ref, b.pred);
  });
}
}  // namespace detail

/// Greedy matching: ascending cost, ties by (ref start, pred start), keep a
/// pair when both sides are still free.
inline Matching match_greedy(std::vector<CandidatePair> cands) {
  std::sort(cands.begin(), cands.end(), [](const CandidatePair& a, const CandidatePair& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.ref_interval.start != b.ref_interval.start) return a.ref_interval.start < b.ref_interval.start;
    if (a.pred_interval.start != b.pred_interval.start) return a.pred_interval.start < b.pred_interval.start;
    return std::pair(a.ref, a.pred) < std::pair(b.ref, b.pred);
  });
  Matching m{MatcherPolicy::greedy, {}};
  std::map<std::size_t, bool> ref_used, pred_used;
  for (const auto& c : cands) {
    if (ref_used[c.ref] || pred_used[c.pred]) continue;
    ref_used[c.ref] = pred_used[c.pred] = true;
    m.pairs.push_back(c);
  }
  detail::sort_by_ref(m.pairs);
  return m;
}

class MatcherBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultExactBound = 24;

namespace detail {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// shortest augmenting paths with potentials. Returns column per row.
inline std::vector<std::size_t> assign_min_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = n == 0 ? 0 : cost[0].size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Maximum-cardinality matching of minimum total cost among candidates,
/// by reduction to a rectangular assignment problem: candidate cells cost
/// (cost - B) with B larger than any achievable cost spread, so every extra
/// pair outweighs any cost difference, and non-candidate cells cost 0.
inline Matching match_exact(const std::vector<CandidatePair>& cands, std::size_t bound = kDefaultExactBound) {
  std::map<std::size_t, std::size_t> ref_row, pred_col;
  for (const auto& c : cands) {
    ref_row.try_emplace(c.ref, ref_row.size());
    pred_col.try_emplace(c.pred, pred_col.size());
  }
  if (ref_row.size() > bound || pred_col.size() > bound)
    throw MatcherBoundError("exact matcher bound exceeded: " + std::to_string(ref_row.size()) + " references, " +
                            std::to_string(pred_col.size()) + " predictions, bound " + std::to_string(bound));
  Matching m{MatcherPolicy::exact, {}};
  if (cands.empty()) return m;

  double spread = 1.0;
  for (const auto& c : cands) spread += 2.0 * std::abs(c.cost);

  const bool transpose = ref_row.size() > pred_col.size();
  const std::size_t rows = transpose ? pred_col.size() : ref_row.size();
  const std::size_t cols = transpose ? ref_row.size() : pred_col.size();
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols, 0.0));
  std::vector<std::vector<const CandidatePair*>> cell(rows, std::vector<const CandidatePair*>(cols, nullptr));
  for (const auto& c : cands) {
    std::size_t r = ref_row[c.ref], q = pred_col[c.pred];
    if (transpose) std::swap(r, q);
    cost[r][q] = c.cost - spread;
    cell[r][q] = &c;
  }
  const auto assignment = detail::assign_min_cost(cost);
  for (std::size_t r = 0; r < rows; ++r)
    if (const CandidatePair* c = cell[r][assignment[r]]) m.pairs.push_back(*c);
  detail::sort_by_ref(m.pairs);
  return m;
}

inline Matching match(const std::vector<CandidatePair>& cands, MatcherPolicy policy,
                      std::size_t bound = kDefaultExactBound) {
  return policy == MatcherPolicy::greedy ? match_greedy(cands) : match_exact(cands, bound);
}

}  // namespace tracecontract
