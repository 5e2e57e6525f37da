#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tracecontract/contract.hpp"
#include "tracecontract/intervals.hpp"

namespace tracecontract {

/// Greedy vs exact matching on one interval instance, with the event clause
/// values and boundary F1 each policy induces.
struct MatcherAudit {
  bool within_bound = true;
  std::string error;
  std::size_t ref_count = 0;
  std::size_t pred_count = 0;
  std::size_t candidate_count = 0;
  Matching greedy;
  Matching exact;
  bool changed = false;  // the matched pair sets differ
  double bf1_greedy = 1.0;
  double bf1_exact = 1.0;
  double duration_greedy = 1.0;
  double duration_exact = 1.0;
  double fragmentation_greedy = 1.0;
  double fragmentation_exact = 1.0;

  double delta_bf1() const { return bf1_exact - bf1_greedy; }
  double delta_duration() const { return duration_exact - duration_greedy; }
  double delta_fragmentation() const { return fragmentation_exact - fragmentation_greedy; }
  /// Mean change over the two event coordinates.
  double delta_event() const { return 0.5 * (delta_duration() + delta_fragmentation()); }
};

inline MatcherAudit matcher_audit(const std::vector<Interval>& refs, const std::vector<Interval>& preds,
                                  double epsilon, std::size_t bound = kDefaultExactBound) {
  MatcherAudit a;
  a.ref_count = refs.size();
  a.pred_count = preds.size();
  const auto cands = candidates(refs, preds, epsilon);
  a.candidate_count = cands.size();
  a.greedy = match_greedy(cands);
  try {
    a.exact = match_exact(cands, bound);
  } catch (const MatcherBoundError& e) {
    a.within_bound = false;
    a.error = e.what();
    a.exact = a.greedy;
    a.exact.policy = MatcherPolicy::exact;
  }
  a.changed = a.greedy.index_pairs() != a.exact.index_pairs();

  const EventClause duration{"duration_guard", EventObligation::matched_pairs, EventPredicate::duration_within, {}};
  const EventClause fragmentation{"fragmentation_guard", EventObligation::reference_intervals,
                                  EventPredicate::singly_covered, {}};
  auto value = [&](const EventClause& c, const Matching& m) {
    return evaluate_event_clause(c, refs, preds, m, epsilon).coordinate.score.score;
  };
  a.bf1_greedy = boundary_f1(refs, preds, a.greedy);
  a.bf1_exact = boundary_f1(refs, preds, a.exact);
  a.duration_greedy = value(duration, a.greedy);
  a.duration_exact = value(duration, a.exact);
  a.fragmentation_greedy = value(fragmentation, a.greedy);
  a.fragmentation_exact = value(fragmentation, a.exact);
  return a;
}

inline MatcherAudit matcher_audit(const Mask& ref, const Mask& pred, double frame_step, double epsilon,
                                  std::size_t bound = kDefaultExactBound, double merge_gap = 0.0) {
  return matcher_audit(extract_intervals(ref, frame_step, merge_gap), extract_intervals(pred, frame_step, merge_gap),
                       epsilon, bound);
}

}  // namespace tracecontract
