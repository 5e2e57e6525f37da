#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tracecontract/contract.hpp"
#include "tracecontract/frame_monitor.hpp"

namespace tracecontract {

// ---------------------------------------------------------------------------
// Finite-universe checks for frame formulas

/// Enumeration limit: |atoms| * n may not exceed this many bits.
inline constexpr std::size_t kUniverseBits = 20;

class UniverseBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Valuations over every environment of the universe, concatenated. Bit
/// (e * n + i) holds frame i of environment e, where environment e assigns
/// atom a at frame i the bit (e >> (a * n + i)) & 1, atoms in the given order.
struct TruthSignature {
  std::size_t frames = 0;
  std::size_t environments = 0;
  std::vector<std::uint64_t> bits;

  bool get(std::size_t env, std::size_t frame) const {
    const std::size_t k = env * frames + frame;
    return (bits[k / 64] >> (k % 64)) & 1U;
  }
  bool any() const {
    for (auto w : bits)
      if (w) return true;
    return false;
  }
  friend bool operator==(const TruthSignature&, const TruthSignature&) = default;
};

/// Environment number `e` of the universe over `atoms` with n frames.
inline TraceEnvironment universe_environment(const std::vector<std::string>& atoms, std::size_t n, double frame_step,
                                             std::uint64_t e) {
  TraceEnvironment env(frame_step, n);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    Mask m(n, 0);
    for (std::size_t i = 0; i < n; ++i) m[i] = (e >> (a * n + i)) & 1U;
    env.set(atoms[a], std::move(m));
  }
  return env;
}

inline TruthSignature truth_signature(const Formula& f, const std::vector<std::string>& atoms, std::size_t n,
                                      double frame_step, std::size_t max_bits = kUniverseBits) {
  if (atoms.size() * n > max_bits)
    throw UniverseBoundError("universe of " + std::to_string(atoms.size()) + " atoms over " + std::to_string(n) +
                             " frames exceeds 2^" + std::to_string(max_bits) + " environments");
  const EvaluationPlan plan(f);
  TruthSignature sig;
  sig.frames = n;
  sig.environments = std::size_t{1} << (atoms.size() * n);
  sig.bits.assign((sig.environments * n + 63) / 64, 0);
  for (std::uint64_t e = 0; e < sig.environments; ++e) {
    const Mask v = plan.evaluate(universe_environment(atoms, n, frame_step, e));
    for (std::size_t i = 0; i < n; ++i)
      if (v[i]) {
        const std::size_t k = e * n + i;
        sig.bits[k / 64] |= std::uint64_t{1} << (k % 64);
      }
  }
  return sig;
}

/// True iff some environment of the universe makes some frame true.
inline bool satisfiable(const Formula& f, const std::vector<std::string>& atoms, std::size_t n, double frame_step,
                        std::size_t max_bits = kUniverseBits) {
  if (atoms.size() * n > max_bits)
    throw UniverseBoundError("universe too large for exhaustive satisfiability");
  const EvaluationPlan plan(f);
  const std::uint64_t count = std::uint64_t{1} << (atoms.size() * n);
  for (std::uint64_t e = 0; e < count; ++e) {
    const Mask v = plan.evaluate(universe_environment(atoms, n, frame_step, e));
    for (auto b : v)
      if (b) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Calibration and contract selection

struct CalibrationCase {
  std::string id;
  Mask ref;
  Mask pred;
  double frame_step = 0.02;
  double risk = 0.0;
};

struct BasisClause {
  std::size_t source_index = 0;
  Clause clause;
  std::size_t cost = 1;

  const std::string& name() const { return clause_name(clause); }
};

/// Ordered candidate clauses plus the settings they are monitored under.
struct CandidateBasis {
  ContractSettings settings;
  std::vector<BasisClause> clauses;

  static CandidateBasis from_contract(const Contract& c) {
    CandidateBasis b;
    b.settings = c.settings;
    for (std::size_t k = 0; k < c.clauses.size(); ++k) b.clauses.push_back({k, c.clauses[k], clause_cost(c.clauses[k])});
    return b;
  }

  Contract as_contract() const {
    Contract c;
    c.settings = settings;
    for (const auto& bc : clauses) c.clauses.push_back(bc.clause);
    return c;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : clauses) out.push_back(c.name());
    return out;
  }
};

/// values[k][w]: clause k of the basis monitored on case w.
inline std::vector<std::vector<double>> clause_signatures(const CandidateBasis& basis,
                                                          const std::vector<CalibrationCase>& cases) {
  std::vector<std::vector<double>> values(basis.clauses.size(), std::vector<double>(cases.size(), 1.0));
  if (basis.clauses.empty()) return values;
  Contract contract = basis.as_contract();
  // Duplicate clause names are legal in a candidate basis; rename internally.
  for (std::size_t k = 0; k < contract.clauses.size(); ++k)
    std::visit([k](auto& c) { c.name = "c" + std::to_string(k); }, contract.clauses[k]);
  for (std::size_t w = 0; w < cases.size(); ++w) {
    const auto r = monitor(contract, cases[w].ref, cases[w].pred, cases[w].frame_step);
    for (std::size_t k = 0; k < basis.clauses.size(); ++k) values[k][w] = r.guards.coordinates[k].score.score;
  }
  return values;
}

struct EquivalenceClass {
  std::vector<std::size_t> members;  // positions in the basis, ascending
  bool constant = false;
  std::vector<double> signature;
};

/// Groups clauses whose values agree on every calibration case.
inline std::vector<EquivalenceClass> observational_classes(const CandidateBasis& basis,
                                                           const std::vector<CalibrationCase>& cases) {
  const auto values = clause_signatures(basis, cases);
  std::vector<EquivalenceClass> out;
  std::map<std::vector<double>, std::size_t> index;
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto [it, inserted] = index.try_emplace(values[k], out.size());
    if (inserted) {
      EquivalenceClass c;
      c.signature = values[k];
      c.constant = std::all_of(values[k].begin(), values[k].end(), [&](double v) { return v == values[k].front(); });
      out.push_back(std::move(c));
    }
    out[it->second].members.push_back(k);
  }
  return out;
}

/// Lowest-source-order representative of every nonconstant class.
inline CandidateBasis retained_basis(const CandidateBasis& basis, const std::vector<CalibrationCase>& cases) {
  CandidateBasis out;
  out.settings = basis.settings;
  std::vector<std::size_t> keep;
  for (const auto& c : observational_classes(basis, cases)) {
    if (c.constant) continue;
    std::size_t best = c.members.front();
    for (auto m : c.members)
      if (basis.clauses[m].source_index < basis.clauses[best].source_index) best = m;
    keep.push_back(best);
  }
  std::sort(keep.begin(), keep.end(),
            [&](std::size_t a, std::size_t b) { return basis.clauses[a].source_index < basis.clauses[b].source_index; });
  for (auto k : keep) out.clauses.push_back(basis.clauses[k]);
  return out;
}

/// For a strict risk pair (lower, higher): the clause witnessing c(lower) > c(higher).
struct SeparationWitness {
  std::size_t lower = 0;   // case index with smaller risk
  std::size_t higher = 0;  // case index with larger risk
  std::size_t clause = 0;  // position in the basis
};

struct Selection {
  bool feasible = true;
  std::vector<std::size_t> selected;  // positions in the basis, ascending
  std::size_t total_cost = 0;
  std::vector<SeparationWitness> certificate;
  std::optional<std::pair<std::size_t, std::size_t>> unseparated;  // (lower, higher) case indices
};

/// True when `chosen` separates every strict risk pair.
inline bool separates(const std::vector<std::vector<double>>& values, const std::vector<CalibrationCase>& cases,
                      const std::vector<std::size_t>& chosen) {
  for (std::size_t u = 0; u < cases.size(); ++u)
    for (std::size_t v = 0; v < cases.size(); ++v) {
      if (!(cases[u].risk < cases[v].risk)) continue;
      bool ok = false;
      for (auto c : chosen) ok = ok || values[c][u] > values[c][v];
      if (!ok) return false;
    }
  return true;
}

/// Lexicographically least separating subset under (size, total cost, sorted
/// source-order tuple). Searches subsets by increasing size; each strict risk
/// pair contributes the set of clauses that separate it, and a subset must
/// hit every such set.
inline Selection select_contract(const CandidateBasis& basis, const std::vector<CalibrationCase>& cases) {
  const std::size_t m = basis.clauses.size();
  if (m > 64) throw std::invalid_argument("selection supports at most 64 candidate clauses");
  const auto values = clause_signatures(basis, cases);

  Selection out;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::uint64_t> hitting;
  for (std::size_t u = 0; u < cases.size(); ++u)
    for (std::size_t v = 0; v < cases.size(); ++v) {
      if (!(cases[u].risk < cases[v].risk)) continue;
      std::uint64_t mask = 0;
      for (std::size_t k = 0; k < m; ++k)
        if (values[k][u] > values[k][v]) mask |= std::uint64_t{1} << k;
      if (mask == 0) {
        out.feasible = false;
        out.unseparated = {u, v};
        return out;
      }
      pairs.emplace_back(u, v);
      hitting.push_back(mask);
    }

  auto cost_of = [&](const std::vector<std::size_t>& s) {
    std::size_t c = 0;
    for (auto k : s) c += basis.clauses[k].cost;
    return c;
  };
  auto source_tuple = [&](const std::vector<std::size_t>& s) {
    std::vector<std::size_t> t;
    for (auto k : s) t.push_back(basis.clauses[k].source_index);
    std::sort(t.begin(), t.end());
    return t;
  };

  for (std::size_t size = 0; size <= m; ++size) {
    std::optional<std::vector<std::size_t>> best;
    std::vector<std::size_t> combo(size);
    for (std::size_t i = 0; i < size; ++i) combo[i] = i;
    while (true) {
      std::uint64_t chosen = 0;
      for (auto k : combo) chosen |= std::uint64_t{1} << k;
      bool ok = true;
      for (auto h : hitting)
        if (!(h & chosen)) {
          ok = false;
          break;
        }
      if (ok) {
        if (!best || std::pair(cost_of(combo), source_tuple(combo)) < std::pair(cost_of(*best), source_tuple(*best)))
          best = combo;
      }
      // next combination in lexicographic order
      std::size_t i = size;
      while (i > 0 && combo[i - 1] == m - size + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
    if (best) {
      out.selected = *best;
      out.total_cost = cost_of(*best);
      for (std::size_t p = 0; p < pairs.size(); ++p)
        for (auto k : out.selected)
          if (hitting[p] >> k & 1U) {
            out.certificate.push_back({pairs[p].first, pairs[p].second, k});
            break;
          }
      return out;
    }
  }
  out.feasible = false;
  return out;
}

// ---------------------------------------------------------------------------
// Risk profiles

struct ProfileScore {
  double score = 0.0;
  std::string lead;  // coordinate with the largest weight, first in vector order on ties
};

/// Normalized weighted mean of the guard vector. Coordinates absent from
/// the weight map get weight zero.
inline ProfileScore profile_score(const GuardVector& v, const std::map<std::string, double>& weights) {
  double total = 0.0, acc = 0.0, lead_w = -1.0;
  ProfileScore out;
  for (const auto& [name, w] : weights)
    if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");
  for (const auto& c : v.coordinates) {
    auto it = weights.find(c.name);
    const double w = it == weights.end() ? 0.0 : it->second;
    total += w;
    acc += w * c.score.score;
    if (w > lead_w) {
      lead_w = w;
      out.lead = c.name;
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("profile weights are all zero on this vector");
  out.score = acc / total;
  return out;
}

/// Named weight profiles over the default coordinates.
inline std::map<std::string, std::map<std::string, double>> builtin_profiles() {
  return {
      {"balanced",
       {{"onset_guard", 1}, {"offset_guard", 1}, {"missing_guard", 1}, {"spurious_guard", 1},
        {"silence_guard", 1}, {"duration_guard", 1}, {"fragmentation_guard", 1}}},
      {"support_recall", {{"missing_guard", 1}}},
      {"edge_timing", {{"onset_guard", 1}, {"offset_guard", 1}}},
      {"silence_protection", {{"silence_guard", 2}, {"spurious_guard", 1}}},
      {"event_integrity", {{"fragmentation_guard", 2}, {"duration_guard", 1}}},
  };
}

}  // namespace tracecontract
