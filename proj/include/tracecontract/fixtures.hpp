#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tracecontract/basis.hpp"
#include "tracecontract/frame_monitor.hpp"
#include "tracecontract/intervals.hpp"

namespace tracecontract {

enum class PathologyKind {
  late_onset,
  early_onset,
  late_release,
  early_release,
  missing,
  extra,
  silence_bleed,
  length_distortion,
  fragmentation,
  bridge_left,
  bridge_right,
  split,
  nominal,
};

inline const char* to_string(PathologyKind k) {
  switch (k) {
    case PathologyKind::late_onset: return "late_onset";
    case PathologyKind::early_onset: return "early_onset";
    case PathologyKind::late_release: return "late_release";
    case PathologyKind::early_release: return "early_release";
    case PathologyKind::missing: return "missing";
    case PathologyKind::extra: return "extra";
    case PathologyKind::silence_bleed: return "silence_bleed";
    case PathologyKind::length_distortion: return "length_distortion";
    case PathologyKind::fragmentation: return "fragmentation";
    case PathologyKind::bridge_left: return "bridge_left";
    case PathologyKind::bridge_right: return "bridge_right";
    case PathologyKind::split: return "split";
    case PathologyKind::nominal: return "nominal";
  }
  return "?";
}

inline PathologyKind parse_pathology(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(PathologyKind::nominal); ++k)
    if (s == to_string(static_cast<PathologyKind>(k))) return static_cast<PathologyKind>(k);
  throw std::invalid_argument("unknown pathology '" + s + "'");
}

/// Magnitude units by kind:
///   shifts, length_distortion, silence_bleed, extra: seconds
///   fragmentation: sub-run count; missing: runs removed (0 = all)
///   bridge_left, bridge_right, split: frames
struct TracePathology {
  PathologyKind kind = PathologyKind::nominal;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

inline Mask make_trace(const std::vector<Interval>& events, std::size_t frame_count, double frame_step) {
  return rasterize(events, frame_count, frame_step);
}

namespace detail {

using Run = std::pair<std::ptrdiff_t, std::ptrdiff_t>;  // frame range [first, last)

inline std::vector<Run> runs_of(const Mask& m) {
  std::vector<Run> out;
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  for (std::ptrdiff_t i = 0; i < n;) {
    if (!m[i]) {
      ++i;
      continue;
    }
    std::ptrdiff_t j = i;
    while (j < n && m[j]) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

inline void paint(Mask& m, std::ptrdiff_t a, std::ptrdiff_t b, std::uint8_t v = 1) {
  if (a < 0 || b > static_cast<std::ptrdiff_t>(m.size()))
    throw std::out_of_range("pathology magnitude exceeds trace bounds");
  for (auto i = a; i < b; ++i) m[i] = v;
}

inline std::ptrdiff_t frames_of(double seconds, double frame_step) {
  if (!(seconds >= 0.0)) throw std::invalid_argument("pathology magnitude must be nonnegative");
  return static_cast<std::ptrdiff_t>(radius_frames(seconds, frame_step));
}

inline std::ptrdiff_t count_of(double magnitude) {
  if (!(magnitude >= 0.0) || magnitude != std::floor(magnitude))
    throw std::invalid_argument("count magnitude must be a nonnegative integer");
  return static_cast<std::ptrdiff_t>(magnitude);
}

// Bridge geometry on a run pair (a, b): a short alternative covering the
// outer edge of one run, and a long prediction spanning the gap that stops
// 2m frames short of the other run's far edge.
inline void bridge(Mask& out, const Run& a, const Run& b, std::ptrdiff_t m, bool left) {
  if (left) {
    paint(out, a.first, a.first + 2);
    paint(out, a.first + 3, b.second - 2 * m);
  } else {
    paint(out, b.second - 2, b.second);
    paint(out, a.first + 2 * m, b.second - 3);
  }
}

}  // namespace detail

inline Mask apply_pathology(const Mask& ref, const TracePathology& p, double frame_step) {
  using detail::paint;
  const auto runs = detail::runs_of(ref);
  Mask out(ref.size(), 0);

  switch (p.kind) {
    case PathologyKind::nominal:
      return ref;

    case PathologyKind::late_onset:
    case PathologyKind::early_onset:
    case PathologyKind::late_release:
    case PathologyKind::early_release:
    case PathologyKind::length_distortion: {
      const auto k = detail::frames_of(p.magnitude, frame_step);
      for (auto [s, e] : runs) {
        if (p.kind == PathologyKind::late_onset) s += k;
        if (p.kind == PathologyKind::early_onset) s -= k;
        if (p.kind == PathologyKind::late_release) e += k;
        if (p.kind == PathologyKind::early_release) e -= k;
        if (p.kind == PathologyKind::length_distortion) s += k, e -= k;
        if (s >= e) throw std::invalid_argument("pathology magnitude erases a run");
        paint(out, s, e);
      }
      return out;
    }

    case PathologyKind::missing: {
      const auto drop = detail::count_of(p.magnitude);
      if (drop == 0 || drop >= static_cast<std::ptrdiff_t>(runs.size())) return out;
      std::vector<std::size_t> order(runs.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::mt19937_64 rng(p.seed);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<bool> dropped(runs.size(), false);
      for (std::ptrdiff_t i = 0; i < drop; ++i) dropped[order[i]] = true;
      for (std::size_t i = 0; i < runs.size(); ++i)
        if (!dropped[i]) paint(out, runs[i].first, runs[i].second);
      return out;
    }

    case PathologyKind::extra: {
      // One burst centered in the widest inactive gap, earliest on ties.
      out = ref;
      const auto k = detail::frames_of(p.magnitude, frame_step);
      const auto n = static_cast<std::ptrdiff_t>(ref.size());
      std::ptrdiff_t best_a = 0, best_len = -1, prev = 0;
      auto consider = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
        if (b - a > best_len) best_a = a, best_len = b - a;
      };
      for (const auto& [s, e] : runs) {
        consider(prev, s);
        prev = e;
      }
      consider(prev, n);
      if (k + 2 > best_len) throw std::out_of_range("extra burst does not fit in any gap");
      const auto a = best_a + (best_len - k) / 2;
      paint(out, a, a + k);
      return out;
    }

    case PathologyKind::silence_bleed: {
      // Bursts of k frames on both sides of each run, k frames away from it.
      out = ref;
      const auto k = detail::frames_of(p.magnitude, frame_step);
      if (k == 0) return out;
      for (const auto& [s, e] : runs) {
        paint(out, s - 2 * k, s - k);
        paint(out, e + k, e + 2 * k);
      }
      return out;
    }

    case PathologyKind::fragmentation: {
      const auto c = detail::count_of(p.magnitude);
      if (c < 1) throw std::invalid_argument("fragmentation count must be at least 1");
      for (const auto& [s, e] : runs) {
        const auto len = e - s;
        if (len < 2 * c - 1) throw std::invalid_argument("run too short for the requested fragment count");
        paint(out, s, e);
        for (std::ptrdiff_t j = 1; j < c; ++j) out[s + (j * len) / c] = 0;
      }
      return out;
    }

    case PathologyKind::bridge_left:
    case PathologyKind::bridge_right: {
      const auto m = detail::count_of(p.magnitude);
      std::size_t i = 0;
      for (; i + 1 < runs.size(); i += 2)
        detail::bridge(out, runs[i], runs[i + 1], m, p.kind == PathologyKind::bridge_left);
      if (i < runs.size()) paint(out, runs[i].first, runs[i].second);
      return out;
    }

    case PathologyKind::split: {
      // Gap of m frames placed at 60% of the run, so the two halves never tie.
      const auto m = detail::count_of(p.magnitude);
      for (const auto& [s, e] : runs) {
        paint(out, s, e);
        const auto g = s + (3 * (e - s)) / 5;
        if (g + m >= e) throw std::invalid_argument("split gap does not fit inside the run");
        for (auto i = g; i < g + m; ++i) out[i] = 0;
      }
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Named fixtures

struct TracePair {
  std::string id;
  Mask ref;
  Mask pred;
  double frame_step = 0.02;
};

inline constexpr double kFixtureStep = 0.02;
inline constexpr std::size_t kFixtureFrames = 150;

/// One event [1.00, 2.00) predicted as [1.06, 2.40): onset 60 ms late,
/// release 400 ms late.
inline TracePair worked_trace() {
  return {"worked", make_trace({{1.0, 2.0}}, kFixtureFrames, kFixtureStep),
          make_trace({{1.06, 2.40}}, kFixtureFrames, kFixtureStep), kFixtureStep};
}

/// One event [1.00, 2.00) predicted as three short events inside it.
inline TracePair fragmented_trace() {
  TracePair t{"fragmented", make_trace({{1.0, 2.0}}, kFixtureFrames, kFixtureStep), {}, kFixtureStep};
  t.pred = apply_pathology(t.ref, {PathologyKind::fragmentation, 3, 0}, kFixtureStep);
  return t;
}

/// Two 0.5 s events separated by 0.3 s.
inline Mask stress_reference() { return make_trace({{1.0, 1.5}, {1.8, 2.3}}, kFixtureFrames, kFixtureStep); }

inline TracePair stress_trace(PathologyKind kind, int frames) {
  TracePair t{std::string(to_string(kind)) + "_" + std::to_string(frames), stress_reference(), {}, kFixtureStep};
  t.pred = apply_pathology(t.ref, {kind, static_cast<double>(frames), 0}, kFixtureStep);
  return t;
}

/// The bridge prediction: greedy takes the bridge for the first event and
/// strands the second; exact matching keeps both events at ε = 0.04 s.
inline TracePair bridge_trace() {
  auto t = stress_trace(PathologyKind::bridge_left, 3);
  t.id = "bridge";
  return t;
}
inline TracePair split_trace() {
  auto t = stress_trace(PathologyKind::split, 2);
  t.id = "split";
  return t;
}
inline TracePair nominal_trace() {
  auto t = stress_trace(PathologyKind::nominal, 0);
  t.id = "nominal";
  return t;
}
inline constexpr double kStressTolerance = 0.04;

/// Stress sweep: the nominal case, then each family over {1, 2, 3, 4} frames.
inline std::vector<TracePair> stress_family() {
  std::vector<TracePair> out{stress_trace(PathologyKind::nominal, 0)};
  for (auto kind : {PathologyKind::bridge_left, PathologyKind::bridge_right, PathologyKind::split})
    for (int m = 1; m <= 4; ++m) out.push_back(stress_trace(kind, m));
  return out;
}

/// Tolerance and silence ratio the calibration set is designed for.
inline constexpr double kCalibrationTolerance = 0.08;

/// Nine risk-ranked cases on one reference event [1.00, 2.00).
inline std::vector<CalibrationCase> calibration_cases() {
  const double h = kFixtureStep;
  const Mask ref = make_trace({{1.0, 2.0}}, kFixtureFrames, h);
  struct Row {
    const char* id;
    PathologyKind kind;
    double magnitude;
    double risk;
  };
  const Row rows[] = {
      {"early_onset", PathologyKind::early_onset, 0.06, 3},
      {"late_onset", PathologyKind::late_onset, 0.10, 4},
      {"late_release", PathologyKind::late_release, 0.10, 4},
      {"early_release", PathologyKind::early_release, 0.10, 4},
      {"length_distortion", PathologyKind::length_distortion, 0.10, 4},
      {"fragmentation", PathologyKind::fragmentation, 3, 4},
      {"missing", PathologyKind::missing, 0, 5},
      {"extra", PathologyKind::extra, 0.60, 5},
      {"silence_bleed", PathologyKind::silence_bleed, 0.04, 5},
  };
  std::vector<CalibrationCase> out;
  for (const auto& r : rows) out.push_back({r.id, ref, apply_pathology(ref, {r.kind, r.magnitude, 0}, h), h, r.risk});
  return out;
}

}  // namespace tracecontract
