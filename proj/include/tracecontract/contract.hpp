#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tracecontract/formula.hpp"
#include "tracecontract/frame_monitor.hpp"
#include "tracecontract/intervals.hpp"

namespace tracecontract {

// ---------------------------------------------------------------------------
// Clauses and contracts

struct FrameClause {
  std::string name;
  Formula formula;
  Formula obligation;
  std::string formula_text;
  std::string obligation_text;
};

enum class EventObligation { matched_pairs, reference_intervals, predicted_intervals };
enum class EventPredicate { duration_within, singly_covered, latency_window, overlap_purity };

inline const char* to_string(EventObligation o) {
  switch (o) {
    case EventObligation::matched_pairs: return "matched_pairs";
    case EventObligation::reference_intervals: return "reference_intervals";
    case EventObligation::predicted_intervals: return "predicted_intervals";
  }
  return "?";
}

inline const char* to_string(EventPredicate p) {
  switch (p) {
    case EventPredicate::duration_within: return "duration_within";
    case EventPredicate::singly_covered: return "singly_covered";
    case EventPredicate::latency_window: return "latency_window";
    case EventPredicate::overlap_purity: return "overlap_purity";
  }
  return "?";
}

/// The obligation each predicate is defined over.
inline EventObligation required_obligation(EventPredicate p) {
  switch (p) {
    case EventPredicate::duration_within: return EventObligation::matched_pairs;
    case EventPredicate::singly_covered:
    case EventPredicate::latency_window: return EventObligation::reference_intervals;
    case EventPredicate::overlap_purity: return EventObligation::predicted_intervals;
  }
  return EventObligation::matched_pairs;
}

/// Event clause; parameters are in seconds. Missing parameters fall back to
/// multiples of the contract tolerance (max_diff 2ε, lead ε, lag 2ε).
struct EventClause {
  std::string name;
  EventObligation obligation = EventObligation::matched_pairs;
  EventPredicate predicate = EventPredicate::duration_within;
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

using Clause = std::variant<FrameClause, EventClause>;

inline const std::string& clause_name(const Clause& c) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, c);
}

/// Node count used as the monitoring cost of a clause.
inline std::size_t clause_cost(const Clause& c) {
  if (const auto* f = std::get_if<FrameClause>(&c)) return node_count(f->formula) + node_count(f->obligation);
  return 1;
}

struct ContractSettings {
  double tolerance = 0.04;
  double silence_ratio = 0.5;  // silence radius = ratio * tolerance
  double merge_gap = 0.0;
  MatcherPolicy matcher = MatcherPolicy::greedy;
  std::size_t exact_bound = kDefaultExactBound;
  double soft_scale = 0.05;
};

struct Contract {
  ContractSettings settings;
  std::vector<Clause> clauses;

  double tolerance() const { return settings.tolerance; }
  double silence_radius() const { return settings.silence_ratio * settings.tolerance; }

  const Clause* find(const std::string& name) const {
    for (const auto& c : clauses)
      if (clause_name(c) == name) return &c;
    return nullptr;
  }

  void validate() const {
    if (!(settings.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (!(settings.silence_ratio > 0.0) || settings.silence_ratio > 1.0)
      throw std::invalid_argument("silence radius must be positive and no larger than the tolerance");
    if (settings.merge_gap < 0.0) throw std::invalid_argument("merge gap must be nonnegative");
    if (!(settings.soft_scale > 0.0)) throw std::invalid_argument("soft boundary scale must be positive");
    std::set<std::string> names;
    for (const auto& c : clauses) {
      if (!names.insert(clause_name(c)).second)
        throw std::invalid_argument("duplicate clause name '" + clause_name(c) + "'");
      if (const auto* e = std::get_if<EventClause>(&c)) {
        if (e->obligation != required_obligation(e->predicate))
          throw std::invalid_argument("clause '" + e->name + "': predicate " + to_string(e->predicate) +
                                      " requires obligation " + to_string(required_obligation(e->predicate)));
        for (const auto& [k, v] : e->params)
          if (!(v > 0.0)) throw std::invalid_argument("clause '" + e->name + "': parameter " + k + " must be positive");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Results

enum class ClauseKind { frame, event };

struct GuardCoordinate {
  std::string name;
  ClauseKind kind = ClauseKind::frame;
  ObligationScore score;
  /// Mean witness over violated obligations that have one: seconds for frame
  /// and duration/latency clauses, a count for fragmentation, absent when
  /// nothing is violated or no witness exists.
  std::optional<double> witness_mean;
};

/// Ordered contract coordinates, in contract source order.
struct GuardVector {
  std::vector<GuardCoordinate> coordinates;

  std::size_t size() const { return coordinates.size(); }
  bool empty() const { return coordinates.empty(); }

  const GuardCoordinate& at(const std::string& name) const {
    for (const auto& c : coordinates)
      if (c.name == name) return c;
    throw std::out_of_range("no coordinate named '" + name + "'");
  }
  double operator[](const std::string& name) const { return at(name).score.score; }

  std::vector<double> scores() const {
    std::vector<double> out;
    for (const auto& c : coordinates) out.push_back(c.score.score);
    return out;
  }
};

/// Unweighted mean of the vector's coordinates, computed from the vector.
inline double mean_logic(const GuardVector& v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty guard vector");
  double s = 0.0;
  for (const auto& c : v.coordinates) s += c.score.score;
  return s / static_cast<double>(v.size());
}

struct WitnessReport {
  std::optional<double> onset_mae_ms;
  std::optional<double> offset_mae_ms;
  std::size_t onset_excluded = 0;   // reference onsets with no prediction edge at all
  std::size_t offset_excluded = 0;
  std::vector<double> duration_abs_diffs;             // seconds, one per matched pair
  std::vector<std::size_t> fragmentation_excess;      // one per reference interval
};

struct MonitorResult {
  GuardVector guards;
  WitnessReport witnesses;
  std::vector<Interval> refs;
  std::vector<Interval> preds;
  Matching matching;
  double boundary_f1 = 1.0;
  double soft_boundary = 1.0;
};

// ---------------------------------------------------------------------------
// Companion scores

/// Event-level F1 from a matching: precision |M|/|P|, recall |M|/|R|.
inline double boundary_f1(std::size_t ref_count, std::size_t pred_count, std::size_t matched) {
  if (ref_count == 0 && pred_count == 0) return 1.0;
  if (ref_count == 0 || pred_count == 0 || matched == 0) return 0.0;
  const double precision = static_cast<double>(matched) / static_cast<double>(pred_count);
  const double recall = static_cast<double>(matched) / static_cast<double>(ref_count);
  return 2.0 * precision * recall / (precision + recall);
}

inline double boundary_f1(const std::vector<Interval>& refs, const std::vector<Interval>& preds, const Matching& m) {
  return boundary_f1(refs.size(), preds.size(), m.size());
}

/// Edge times (onsets and offsets) of a mask, in seconds.
inline std::vector<double> edge_times(const Mask& m, double frame_step) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool on = m[i] && (i == 0 || !m[i - 1]);
    const bool off = !m[i] && i > 0 && m[i - 1];
    if (on || off) out.push_back(static_cast<double>(i) * frame_step);
  }
  return out;
}

/// Symmetrized exponential-kernel agreement between the two edge sets:
/// mean over both directions of exp(-d/scale), d the nearest opposite edge.
inline double soft_boundary(const Mask& ref, const Mask& pred, double frame_step, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("soft boundary scale must be positive");
  if (ref.size() != pred.size()) throw std::invalid_argument("reference and prediction masks differ in length");
  const auto er = edge_times(ref, frame_step);
  const auto ep = edge_times(pred, frame_step);
  if (er.empty() && ep.empty()) return 1.0;
  if (er.empty() || ep.empty()) return 0.0;
  auto directed = [scale](const std::vector<double>& from, const std::vector<double>& to) {
    double s = 0.0;
    for (double t : from) {
      auto it = std::lower_bound(to.begin(), to.end(), t);
      double d = std::numeric_limits<double>::infinity();
      if (it != to.end()) d = std::min(d, *it - t);
      if (it != to.begin()) d = std::min(d, t - *std::prev(it));
      s += std::exp(-d / scale);
    }
    return s / static_cast<double>(from.size());
  };
  return 0.5 * (directed(er, ep) + directed(ep, er));
}

// ---------------------------------------------------------------------------
// Clause evaluation

namespace detail {

// Distance in frames from i to the nearest true frame of m, if any.
inline std::optional<std::size_t> nearest_true(const Mask& m, std::size_t i) {
  for (std::size_t d = 0; d < m.size(); ++d) {
    if (i >= d && m[i - d]) return d;
    if (i + d < m.size() && m[i + d]) return d;
    if (i < d && i + d >= m.size()) break;
  }
  return std::nullopt;
}

// The subformula a violated frame obligation is measured against: the
// witness child of an implication's consequent neighborhood, or the formula.
inline Formula witness_target(const Formula& f) {
  if (f.op() != Op::implication) return f;
  Formula rhs = f.right();
  if (rhs.op() == Op::near || rhs.op() == Op::future) return rhs.child();
  return rhs;
}

}  // namespace detail

/// Distance, in frames, from frame i to the nearest frame where `target` is
/// true; the witness for a violated neighborhood obligation.
inline std::optional<std::size_t> nearest_true_distance(const Mask& target, std::size_t i) {
  return detail::nearest_true(target, i);
}

inline GuardCoordinate evaluate_frame_clause(const FrameClause& clause, const TraceEnvironment& env) {
  const Mask values = evaluate(clause.formula, env);
  const Mask obligated = evaluate(clause.obligation, env);
  GuardCoordinate g{clause.name, ClauseKind::frame, score_masks(values, obligated), std::nullopt};
  if (g.score.violated == 0) return g;
  const Mask target = evaluate(detail::witness_target(clause.formula), env);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!obligated[i] || values[i]) continue;
    if (auto d = detail::nearest_true(target, i)) {
      sum += static_cast<double>(*d) * env.frame_step();
      ++count;
    }
  }
  if (count) g.witness_mean = sum / static_cast<double>(count);
  return g;
}

/// Reference intervals of every class, for the overlap purity predicate.
struct ClassContext {
  std::string own_class;
  std::map<std::string, std::vector<Interval>> refs_by_class;
};

struct EventClauseResult {
  GuardCoordinate coordinate;
  std::vector<double> witnesses;  // per obligation item, 0 when satisfied
};

/// Number of predictions with positive overlap against a reference interval.
inline std::size_t covering_count(const Interval& r, const std::vector<Interval>& preds) {
  std::size_t n = 0;
  for (const auto& p : preds)
    if (overlap(r, p) > kTimeSlack) ++n;
  return n;
}

inline EventClauseResult evaluate_event_clause(const EventClause& clause, const std::vector<Interval>& refs,
                                               const std::vector<Interval>& preds, const Matching& matching,
                                               double tolerance, const ClassContext* classes = nullptr) {
  std::size_t sat = 0, viol = 0;
  std::vector<double> witnesses;
  auto record = [&](bool ok, double witness) {
    ok ? ++sat : ++viol;
    witnesses.push_back(ok ? 0.0 : witness);
  };

  switch (clause.predicate) {
    case EventPredicate::duration_within: {
      const double max_diff = clause.param("max_diff", 2.0 * tolerance);
      for (const auto& p : matching.pairs) {
        const double diff = std::abs(p.ref_interval.length() - p.pred_interval.length());
        record(diff <= max_diff + kTimeSlack, diff);
      }
      break;
    }
    case EventPredicate::singly_covered: {
      for (std::size_t i = 0; i < refs.size(); ++i) {
        const std::size_t cover = covering_count(refs[i], preds);
        const bool matched = matching.for_ref(i) != nullptr;
        const double excess = matched ? static_cast<double>(cover - 1) : static_cast<double>(std::max<std::size_t>(1, cover));
        record(matched && cover == 1, excess);
      }
      break;
    }
    case EventPredicate::latency_window: {
      const double lead = clause.param("lead", tolerance);
      const double lag = clause.param("lag", 2.0 * tolerance);
      for (const auto& r : refs) {
        const double open = r.start - lead - kTimeSlack;
        const double close = r.start + lag + kTimeSlack;
        std::optional<double> first;
        for (const auto& p : preds)
          if (p.start >= open && (!first || p.start < *first)) first = p.start;
        const bool ok = first && *first <= close;
        record(ok, first ? *first - (r.start + lag) : std::numeric_limits<double>::quiet_NaN());
      }
      break;
    }
    case EventPredicate::overlap_purity: {
      for (const auto& p : preds) {
        std::map<std::string, double> mass;
        if (classes) {
          for (const auto& [cls, rs] : classes->refs_by_class)
            for (const auto& r : rs) mass[cls] += overlap(r, p);
        } else {
          for (const auto& r : refs) mass[""] += overlap(r, p);
        }
        const std::string own = classes ? classes->own_class : std::string();
        double best = 0.0;
        std::size_t best_count = 0;
        std::string best_class;
        for (const auto& [cls, m] : mass) {
          if (m > best + kTimeSlack) {
            best = m;
            best_count = 1;
            best_class = cls;
          } else if (m > kTimeSlack && std::abs(m - best) <= kTimeSlack) {
            ++best_count;
          }
        }
        const bool ok = best > kTimeSlack && best_count == 1 && best_class == own;
        record(ok, ok ? 0.0 : 1.0);
      }
      break;
    }
  }

  GuardCoordinate g{clause.name, ClauseKind::event, ObligationScore::from_counts(sat, viol), std::nullopt};
  double sum = 0.0;
  std::size_t count = 0;
  for (double w : witnesses)
    if (w != 0.0 && std::isfinite(w)) {
      sum += std::abs(w);
      ++count;
    }
  if (count) g.witness_mean = sum / static_cast<double>(count);
  return {g, std::move(witnesses)};
}

namespace detail {

// Onset (or offset) error per reference edge: matched partner when the
// reference interval is matched, else the nearest prediction edge of the
// same kind. Returns (mean ms, excluded count).
inline std::pair<std::optional<double>, std::size_t> edge_mae(const std::vector<Interval>& refs,
                                                              const std::vector<Interval>& preds,
                                                              const Matching& matching, bool onset) {
  double sum = 0.0;
  std::size_t count = 0, excluded = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const double edge = onset ? refs[i].start : refs[i].end;
    if (const CandidatePair* m = matching.for_ref(i)) {
      sum += std::abs(edge - (onset ? m->pred_interval.start : m->pred_interval.end));
      ++count;
      continue;
    }
    if (preds.empty()) {
      ++excluded;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : preds) best = std::min(best, std::abs(edge - (onset ? p.start : p.end)));
    sum += best;
    ++count;
  }
  if (count == 0) return {std::nullopt, excluded};
  return {1000.0 * sum / static_cast<double>(count), excluded};
}

}  // namespace detail

/// Monitors one reference/prediction mask pair against a contract.
inline MonitorResult monitor(const Contract& contract, const Mask& ref, const Mask& pred, double frame_step,
                             const ClassContext* classes = nullptr) {
  contract.validate();
  const TraceEnvironment env = derive_edge_atoms(ref, pred, frame_step);
  const auto& s = contract.settings;

  MonitorResult out;
  out.refs = extract_intervals(ref, frame_step, s.merge_gap);
  out.preds = extract_intervals(pred, frame_step, s.merge_gap);
  out.matching = match(candidates(out.refs, out.preds, s.tolerance), s.matcher, s.exact_bound);

  for (const auto& clause : contract.clauses) {
    if (const auto* f = std::get_if<FrameClause>(&clause)) {
      out.guards.coordinates.push_back(evaluate_frame_clause(*f, env));
      continue;
    }
    const auto& e = std::get<EventClause>(clause);
    auto r = evaluate_event_clause(e, out.refs, out.preds, out.matching, s.tolerance, classes);
    out.guards.coordinates.push_back(r.coordinate);
  }

  auto& w = out.witnesses;
  std::tie(w.onset_mae_ms, w.onset_excluded) = detail::edge_mae(out.refs, out.preds, out.matching, true);
  std::tie(w.offset_mae_ms, w.offset_excluded) = detail::edge_mae(out.refs, out.preds, out.matching, false);
  for (const auto& p : out.matching.pairs)
    w.duration_abs_diffs.push_back(std::abs(p.ref_interval.length() - p.pred_interval.length()));
  for (std::size_t i = 0; i < out.refs.size(); ++i) {
    const std::size_t cover = covering_count(out.refs[i], out.preds);
    const bool matched = out.matching.for_ref(i) != nullptr;
    w.fragmentation_excess.push_back(matched ? cover - 1 : std::max<std::size_t>(1, cover));
  }

  out.boundary_f1 = boundary_f1(out.refs, out.preds, out.matching);
  out.soft_boundary = soft_boundary(ref, pred, frame_step, s.soft_scale);
  return out;
}

using ClassMasks = std::map<std::string, std::pair<Mask, Mask>>;

struct ClassesResult {
  std::map<std::string, MonitorResult> per_class;
  GuardVector macro;
};

/// Per-coordinate unweighted mean across vectors with identical layout.
/// Counts are summed, so the partition identity still holds.
inline GuardVector macro_average(const std::vector<const GuardVector*>& vectors) {
  GuardVector out;
  if (vectors.empty()) return out;
  const std::size_t m = vectors.front()->size();
  for (std::size_t k = 0; k < m; ++k) {
    GuardCoordinate g = vectors.front()->coordinates[k];
    double sum = 0.0, wsum = 0.0;
    std::size_t wcount = 0;
    g.score = {};
    g.score.score = 0.0;
    for (const auto* v : vectors) {
      const auto& c = v->coordinates.at(k);
      sum += c.score.score;
      g.score.obligated += c.score.obligated;
      g.score.satisfied += c.score.satisfied;
      g.score.violated += c.score.violated;
      if (c.witness_mean) {
        wsum += *c.witness_mean;
        ++wcount;
      }
    }
    g.score.score = sum / static_cast<double>(vectors.size());
    g.witness_mean = wcount ? std::optional<double>(wsum / static_cast<double>(wcount)) : std::nullopt;
    out.coordinates.push_back(std::move(g));
  }
  return out;
}

/// Monitors each class with the same parsed clauses and macro-averages.
inline ClassesResult monitor_classes(const Contract& contract, const ClassMasks& classes, double frame_step) {
  ClassesResult out;
  std::optional<std::size_t> length;
  ClassContext ctx;
  for (const auto& [name, masks] : classes) {
    if (masks.first.size() != masks.second.size() || (length && *length != masks.first.size()))
      throw std::invalid_argument("class '" + name + "' has inconsistent mask lengths");
    length = masks.first.size();
    ctx.refs_by_class[name] = extract_intervals(masks.first, frame_step, contract.settings.merge_gap);
  }
  std::vector<const GuardVector*> vectors;
  for (const auto& [name, masks] : classes) {
    ctx.own_class = name;
    auto [it, _] = out.per_class.emplace(name, monitor(contract, masks.first, masks.second, frame_step, &ctx));
    vectors.push_back(&it->second.guards);
  }
  out.macro = macro_average(vectors);
  return out;
}

/// Elementwise OR of the class masks.
inline std::pair<Mask, Mask> union_masks(const ClassMasks& classes) {
  std::pair<Mask, Mask> out;
  for (const auto& [name, masks] : classes) {
    if (out.first.empty() && out.second.empty()) {
      out = masks;
      continue;
    }
    if (masks.first.size() != out.first.size()) throw std::invalid_argument("class '" + name + "' length differs");
    for (std::size_t i = 0; i < out.first.size(); ++i) {
      out.first[i] = out.first[i] || masks.first[i];
      out.second[i] = out.second[i] || masks.second[i];
    }
  }
  return out;
}

}  // namespace tracecontract
