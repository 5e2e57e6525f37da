#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "tracecontract/formula.hpp"

namespace tracecontract {

/// Boolean sequence over the frame grid, one byte per frame (0 or 1).
using Mask = std::vector<std::uint8_t>;

/// Raised when an atom is missing from the environment or has the wrong length.
class BindingError : public std::runtime_error {
 public:
  BindingError(std::string atom, SourceSpan span, const std::string& message)
      : std::runtime_error(message), atom_(std::move(atom)), span_(span) {}

  const std::string& atom() const { return atom_; }
  const SourceSpan& span() const { return span_; }

 private:
  std::string atom_;
  SourceSpan span_;
};

/// Frame step plus named Boolean sequences of a common length.
class TraceEnvironment {
 public:
  TraceEnvironment(double frame_step, std::size_t frame_count) : frame_step_(frame_step), frame_count_(frame_count) {
    if (!(frame_step > 0.0) || !std::isfinite(frame_step))
      throw std::invalid_argument("frame step must be positive");
  }

  void set(const std::string& name, Mask values) {
    if (values.size() != frame_count_)
      throw BindingError(name, {}, "atom '" + name + "' has length " + std::to_string(values.size()) +
                                       ", expected " + std::to_string(frame_count_));
    atoms_[name] = std::move(values);
  }

  const Mask* find(const std::string& name) const {
    auto it = atoms_.find(name);
    return it == atoms_.end() ? nullptr : &it->second;
  }

  double frame_step() const { return frame_step_; }
  std::size_t frame_count() const { return frame_count_; }
  double frame_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * frame_step_; }
  const std::map<std::string, Mask>& atoms() const { return atoms_; }

 private:
  double frame_step_;
  std::size_t frame_count_;
  std::map<std::string, Mask> atoms_;
};

/// Least integer frame radius whose span is not shorter than `seconds`.
/// Quotients within 1e-9 (relative) of an integer snap to it, so 0.14/0.02
/// yields 7 rather than the 8 a raw ceil of 7.000000000000001 would give.
inline std::size_t radius_frames(double seconds, double frame_step) {
  if (!(seconds > 0.0) || !(frame_step > 0.0) || !std::isfinite(seconds) || !std::isfinite(frame_step))
    throw std::invalid_argument("radius and frame step must be positive and finite");
  const double q = seconds / frame_step;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(q));
}

/// Work counters for the linear-time bound.
struct EvalStats {
  std::size_t node_visits = 0;
  std::size_t cell_ops = 0;
};

namespace detail {

inline std::vector<std::size_t> prefix_counts(const Mask& m) {
  std::vector<std::size_t> p(m.size() + 1, 0);
  for (std::size_t i = 0; i < m.size(); ++i) p[i + 1] = p[i] + (m[i] ? 1 : 0);
  return p;
}

// Count of true frames in [lo, hi] (inclusive, already clipped).
inline std::size_t window_count(const std::vector<std::size_t>& p, std::size_t lo, std::size_t hi) {
  return p[hi + 1] - p[lo];
}

// Applies one operator to already evaluated child sequences.
inline Mask apply_operator(Op op, std::size_t r, const Mask* lhs, const Mask* rhs, std::size_t n, EvalStats* stats) {
  Mask out(n, 0);
  if (stats) stats->cell_ops += n;
  switch (op) {
    case Op::negation:
      for (std::size_t i = 0; i < n; ++i) out[i] = !(*lhs)[i];
      break;
    case Op::conjunction:
      for (std::size_t i = 0; i < n; ++i) out[i] = (*lhs)[i] && (*rhs)[i];
      break;
    case Op::disjunction:
      for (std::size_t i = 0; i < n; ++i) out[i] = (*lhs)[i] || (*rhs)[i];
      break;
    case Op::implication:
      for (std::size_t i = 0; i < n; ++i) out[i] = !(*lhs)[i] || (*rhs)[i];
      break;
    case Op::near: {
      const auto p = prefix_counts(*lhs);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= r ? i - r : 0;
        const std::size_t hi = std::min(n - 1, i + r);
        out[i] = window_count(p, lo, hi) > 0;
      }
      break;
    }
    case Op::future: {
      const auto p = prefix_counts(*lhs);
      for (std::size_t i = 0; i < n; ++i) out[i] = window_count(p, i, std::min(n - 1, i + r)) > 0;
      break;
    }
    case Op::always: {
      const auto p = prefix_counts(*lhs);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t hi = std::min(n - 1, i + r);
        out[i] = window_count(p, i, hi) == hi - i + 1;
      }
      break;
    }
    case Op::until: {
      // Left side must hold on [i, j-1] and right side at j. With
      // first_false[i] the first index >= i where the left side fails, the
      // admissible witnesses are j in [i, min(n-1, i+r, first_false[i])].
      std::vector<std::size_t> first_false(n + 1, n);
      for (std::size_t k = n; k-- > 0;) first_false[k] = (*lhs)[k] ? first_false[k + 1] : k;
      const auto p = prefix_counts(*rhs);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t hi = std::min({n - 1, i + r, first_false[i]});
        out[i] = window_count(p, i, hi) > 0;
      }
      break;
    }
    case Op::atom:
      break;
  }
  return out;
}

inline const Mask& bind_atom(const Formula& f, const TraceEnvironment& env) {
  const Mask* m = env.find(f.name());
  if (!m)
    throw BindingError(f.name(), f.span(),
                       "unknown atom '" + f.name() + "' at offset " + std::to_string(f.span().start));
  return *m;
}

inline Mask evaluate_node(const Formula& f, const TraceEnvironment& env, EvalStats* stats) {
  if (stats) ++stats->node_visits;
  const std::size_t n = env.frame_count();
  const Op op = f.op();
  if (op == Op::atom) {
    if (stats) stats->cell_ops += n;
    return bind_atom(f, env);
  }
  const std::size_t r = is_bounded(op) ? radius_frames(f.radius(), env.frame_step()) : 0;
  if (is_unary(op)) {
    const Mask child = evaluate_node(f.child(), env, stats);
    return apply_operator(op, r, &child, nullptr, n, stats);
  }
  const Mask lhs = evaluate_node(f.left(), env, stats);
  const Mask rhs = evaluate_node(f.right(), env, stats);
  return apply_operator(op, r, &lhs, &rhs, n, stats);
}

}  // namespace detail

/// Frame valuation of a formula. Connectives are pointwise; bounded
/// modalities use prefix sums over the child sequence, windows clipped to
/// [0, n-1]. Total work is O(k n) for k nodes.
inline Mask evaluate(const Formula& f, const TraceEnvironment& env, EvalStats* stats = nullptr) {
  return detail::evaluate_node(f, env, stats);
}

/// Satisfaction counts over the frames selected by an obligation.
struct ObligationScore {
  double score = 1.0;
  std::size_t obligated = 0;
  std::size_t satisfied = 0;
  std::size_t violated = 0;

  static ObligationScore from_counts(std::size_t satisfied, std::size_t violated) {
    ObligationScore s;
    s.satisfied = satisfied;
    s.violated = violated;
    s.obligated = satisfied + violated;
    s.score = s.obligated == 0 ? 1.0 : static_cast<double>(satisfied) / static_cast<double>(s.obligated);
    return s;
  }
};

inline ObligationScore score_masks(const Mask& values, const Mask& obligation) {
  if (values.size() != obligation.size()) throw std::invalid_argument("valuation and obligation lengths differ");
  std::size_t sat = 0, viol = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!obligation[i]) continue;
    if (values[i]) ++sat;
    else ++viol;
  }
  return ObligationScore::from_counts(sat, viol);
}

/// Mean of the formula valuation over obligated frames; 1 when none are obligated.
inline ObligationScore score(const Formula& formula, const Formula& obligation, const TraceEnvironment& env) {
  return score_masks(evaluate(formula, env), evaluate(obligation, env));
}

inline Mask onsets_of(const Mask& m) {
  Mask out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] && (i == 0 || !m[i - 1]);
  return out;
}

inline Mask offsets_of(const Mask& m) {
  Mask out(m.size(), 0);
  for (std::size_t i = 1; i < m.size(); ++i) out[i] = !m[i] && m[i - 1];
  return out;
}

/// Environment with the six edge and activity atoms derived from a
/// reference/prediction mask pair.
inline TraceEnvironment derive_edge_atoms(const Mask& ref, const Mask& pred, double frame_step) {
  if (ref.size() != pred.size())
    throw std::invalid_argument("reference and prediction masks differ in length (" + std::to_string(ref.size()) +
                                " vs " + std::to_string(pred.size()) + ")");
  TraceEnvironment env(frame_step, ref.size());
  env.set("ref_active", ref);
  env.set("pred_active", pred);
  env.set("ref_onset", onsets_of(ref));
  env.set("ref_offset", offsets_of(ref));
  env.set("pred_onset", onsets_of(pred));
  env.set("pred_offset", offsets_of(pred));
  return env;
}

/// A formula compiled to a DAG: structurally equal subtrees share one node.
/// Nodes are stored in topological order (children first); the last node is
/// the root.
class EvaluationPlan {
 public:
  struct Node {
    Op op;
    std::string name;
    double radius = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  explicit EvaluationPlan(const Formula& f) { root_ = intern(f); }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t root() const { return root_; }

  /// Valuations of every plan node; index matches nodes().
  std::vector<Mask> evaluate_all(const TraceEnvironment& env, EvalStats* stats = nullptr) const {
    std::vector<Mask> values(nodes_.size());
    const std::size_t n = env.frame_count();
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const Node& node = nodes_[k];
      if (stats) ++stats->node_visits;
      if (node.op == Op::atom) {
        const Mask* m = env.find(node.name);
        if (!m) throw BindingError(node.name, {}, "unknown atom '" + node.name + "'");
        if (stats) stats->cell_ops += n;
        values[k] = *m;
        continue;
      }
      const std::size_t r = is_bounded(node.op) ? radius_frames(node.radius, env.frame_step()) : 0;
      const Mask* rhs = is_binary(node.op) ? &values[node.right] : nullptr;
      values[k] = detail::apply_operator(node.op, r, &values[node.left], rhs, n, stats);
    }
    return values;
  }

  Mask evaluate(const TraceEnvironment& env, EvalStats* stats = nullptr) const {
    auto values = evaluate_all(env, stats);
    return std::move(values[root_]);
  }

 private:
  using Key = std::tuple<int, std::string, double, std::size_t, std::size_t>;

  std::size_t intern(const Formula& f) {
    Key key;
    if (f.op() == Op::atom) {
      key = {static_cast<int>(f.op()), f.name(), 0.0, 0, 0};
    } else if (is_unary(f.op())) {
      const std::size_t c = intern(f.child());
      key = {static_cast<int>(f.op()), {}, f.radius(), c, 0};
    } else {
      const std::size_t l = intern(f.left());
      const std::size_t r = intern(f.right());
      key = {static_cast<int>(f.op()), {}, f.radius(), l, r};
    }
    auto [it, inserted] = index_.try_emplace(key, nodes_.size());
    if (inserted)
      nodes_.push_back({f.op(), std::get<1>(key), std::get<2>(key), std::get<3>(key), std::get<4>(key)});
    return it->second;
  }

  std::vector<Node> nodes_;
  std::map<Key, std::size_t> index_;
  std::size_t root_ = 0;
};

inline EvaluationPlan share_subformulas(const Formula& f) { return EvaluationPlan(f); }

/// Maximum future time, in seconds, a verdict at the current frame depends on.
inline double lookahead(const Formula& f) {
  switch (f.op()) {
    case Op::atom: return 0.0;
    case Op::negation: return lookahead(f.child());
    case Op::near:
    case Op::future:
    case Op::always: return f.radius() + lookahead(f.child());
    case Op::until: return f.radius() + std::max(lookahead(f.left()), lookahead(f.right()));
    default: return std::max(lookahead(f.left()), lookahead(f.right()));
  }
}

/// Same recursion on the frame grid, with each bound projected to frames.
inline std::size_t lookahead_frames(const Formula& f, double frame_step) {
  switch (f.op()) {
    case Op::atom: return 0;
    case Op::negation: return lookahead_frames(f.child(), frame_step);
    case Op::near:
    case Op::future:
    case Op::always: return radius_frames(f.radius(), frame_step) + lookahead_frames(f.child(), frame_step);
    case Op::until:
      return radius_frames(f.radius(), frame_step) +
             std::max(lookahead_frames(f.left(), frame_step), lookahead_frames(f.right(), frame_step));
    default: return std::max(lookahead_frames(f.left(), frame_step), lookahead_frames(f.right(), frame_step));
  }
}

/// Maximum past context, in frames, a verdict depends on. Only the
/// symmetric neighborhood looks backwards.
inline std::size_t lookback_frames(const Formula& f, double frame_step) {
  switch (f.op()) {
    case Op::atom: return 0;
    case Op::near: return radius_frames(f.radius(), frame_step) + lookback_frames(f.child(), frame_step);
    case Op::negation:
    case Op::future:
    case Op::always: return lookback_frames(f.child(), frame_step);
    default: return std::max(lookback_frames(f.left(), frame_step), lookback_frames(f.right(), frame_step));
  }
}

}  // namespace tracecontract
