#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tracecontract/frame_monitor.hpp"

namespace tracecontract {

struct Verdict {
  std::size_t frame = 0;
  bool value = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Online monitor with bounded delay. Frames arrive one at a time; the
/// verdict for frame i is emitted as soon as frame i + lookahead has arrived
/// (or at finalize), and agrees with offline evaluation of the full trace.
///
/// Single-owner state machine: move it between threads freely, but do not
/// step it concurrently.
class StreamingMonitor {
 public:
  StreamingMonitor(Formula formula, double frame_step)
      : formula_(std::move(formula)),
        plan_(formula_),
        frame_step_(frame_step),
        lookahead_(lookahead_frames(formula_, frame_step)),
        lookback_(lookback_frames(formula_, frame_step)),
        atoms_(atoms_of(formula_)) {
    if (!(frame_step > 0.0)) throw std::invalid_argument("frame step must be positive");
  }

  const Formula& formula() const { return formula_; }
  std::size_t lookahead() const { return lookahead_; }
  std::size_t lookback() const { return lookback_; }
  std::size_t next_emission() const { return next_emit_; }
  std::size_t frames_received() const { return received_; }
  bool finished() const { return finished_; }

  /// Rows currently buffered (past context plus pending frames).
  std::size_t buffered() const { return buffer_.size(); }
  /// Buffered rows at or beyond the next emission index.
  std::size_t pending() const { return received_ - next_emit_; }
  std::size_t max_pending_seen() const { return max_pending_; }

  std::vector<Verdict> step(const std::map<std::string, bool>& frame) {
    if (finished_) throw std::logic_error("monitor already finalized");
    std::map<std::string, bool> row;
    for (const auto& name : atoms_) {
      auto it = frame.find(name);
      if (it == frame.end())
        throw BindingError(name, {}, "frame " + std::to_string(received_) + " is missing atom '" + name + "'");
      row.emplace(name, it->second);
    }
    buffer_.push_back(std::move(row));
    ++received_;
    max_pending_ = std::max(max_pending_, pending());

    std::vector<Verdict> out;
    // Frame i is final once frames up to i + lookahead are present.
    while (next_emit_ + lookahead_ < received_) emit(out, false);
    trim();
    return out;
  }

  /// Flushes every remaining verdict using right-boundary clipping.
  std::vector<Verdict> finalize() {
    std::vector<Verdict> out;
    if (finished_) return out;
    while (next_emit_ < received_) emit(out, true);
    finished_ = true;
    buffer_.clear();
    return out;
  }

 private:
  void emit(std::vector<Verdict>& out, bool at_end) {
    // Evaluate over the buffered window; its left edge is either the true
    // trace start or at least `lookback_` frames behind the emitted index,
    // and its right edge is either the trace end or at least `lookahead_`
    // frames ahead, so clipping artifacts never reach the emitted frame.
    const std::size_t window = buffer_.size();
    TraceEnvironment env(frame_step_, window);
    for (const auto& name : atoms_) {
      Mask m(window, 0);
      for (std::size_t k = 0; k < window; ++k) m[k] = buffer_[k].at(name);
      env.set(name, std::move(m));
    }
    const Mask values = plan_.evaluate(env);
    // Emit every frame that is final within this window in one pass.
    const std::size_t limit = at_end ? received_ : received_ - lookahead_;
    while (next_emit_ < limit) {
      out.push_back({next_emit_, values[next_emit_ - base_] != 0});
      ++next_emit_;
    }
  }

  void trim() {
    const std::size_t keep_from = next_emit_ > lookback_ ? next_emit_ - lookback_ : 0;
    while (base_ < keep_from) {
      buffer_.pop_front();
      ++base_;
    }
  }

  Formula formula_;
  EvaluationPlan plan_;
  double frame_step_;
  std::size_t lookahead_;
  std::size_t lookback_;
  std::set<std::string> atoms_;
  std::deque<std::map<std::string, bool>> buffer_;
  std::size_t base_ = 0;  // trace index of buffer_.front()
  std::size_t received_ = 0;
  std::size_t next_emit_ = 0;
  std::size_t max_pending_ = 0;
  bool finished_ = false;
};

/// Replays a complete environment through a fresh monitor. Returns the
/// verdicts with the step (0-based count of frames received minus one, or
/// the frame count for the finalize flush) at which each was emitted.
struct StreamRecord {
  std::size_t frame = 0;
  std::size_t emitted_at = 0;
  bool verdict = false;
};

inline std::vector<StreamRecord> replay(const Formula& f, const TraceEnvironment& env) {
  StreamingMonitor mon(f, env.frame_step());
  std::vector<StreamRecord> out;
  const auto names = atoms_of(f);
  for (const auto& name : names)
    if (!env.find(name)) throw BindingError(name, {}, "unknown atom '" + name + "'");
  for (std::size_t i = 0; i < env.frame_count(); ++i) {
    std::map<std::string, bool> row;
    for (const auto& name : names) row[name] = (*env.find(name))[i] != 0;
    for (const auto& v : mon.step(row)) out.push_back({v.frame, i, v.value});
  }
  for (const auto& v : mon.finalize()) out.push_back({v.frame, env.frame_count(), v.value});
  return out;
}

}  // namespace tracecontract
