#pragma once

// Exhaustive formula enumeration by height, used for the ambiguity check.

#include <string>
#include <vector>

#include "tracecontract/formula.hpp"

namespace oracle {

struct Alphabet {
  std::vector<std::string> atoms;
  std::vector<tracecontract::Op> unary;   // negation, near, future, always
  std::vector<tracecontract::Op> binary;  // conjunction, disjunction, implication, until
  double radius = 0.04;
};

/// All formulas of height <= depth over the alphabet (atoms have height 0).
inline std::vector<tracecontract::Formula> enumerate_formulas(const Alphabet& a, int depth) {
  using namespace tracecontract;
  std::vector<std::vector<Formula>> by_height(depth + 1);
  for (const auto& name : a.atoms) by_height[0].push_back(atom(name));
  std::vector<Formula> upto = by_height[0];
  for (int h = 1; h <= depth; ++h) {
    const auto& prev = by_height[h - 1];
    auto& cur = by_height[h];
    for (auto op : a.unary)
      for (const auto& c : prev) cur.push_back(Formula::unary(op, c, op == Op::negation ? 0.0 : a.radius));
    // Binary nodes: at least one child of height exactly h-1.
    for (auto op : a.binary) {
      const double r = op == Op::until ? a.radius : 0.0;
      for (const auto& l : upto)
        for (const auto& rr : prev) cur.push_back(Formula::binary(op, l, rr, r));
      for (const auto& l : prev)
        for (const auto& rr : upto)
          if (tree_height(rr) < static_cast<std::size_t>(h - 1)) cur.push_back(Formula::binary(op, l, rr, r));
    }
    upto.insert(upto.end(), cur.begin(), cur.end());
  }
  return upto;
}

}  // namespace oracle
