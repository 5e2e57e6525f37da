#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tracecontract/frame_monitor.hpp"
#include "tracecontract/parser.hpp"

using namespace tracecontract;

namespace {

Mask bits(const std::string& s) {
  Mask m;
  for (char c : s) m.push_back(c == '1');
  return m;
}

TraceEnvironment env_of(const std::map<std::string, std::string>& atoms, double h = 0.02) {
  TraceEnvironment env(h, atoms.begin()->second.size());
  for (const auto& [k, v] : atoms) env.set(k, bits(v));
  return env;
}

Mask eval(const std::string& f, const TraceEnvironment& env) { return evaluate(parse_formula(f), env); }

}  // namespace

TEST(RadiusFrames, SnapsNearIntegers) {
  EXPECT_EQ(radius_frames(0.04, 0.02), 2u);
  EXPECT_EQ(radius_frames(0.06, 0.02), 3u);  // 2.9999999999999996
  EXPECT_EQ(radius_frames(0.14, 0.02), 7u);  // 7.000000000000001
  EXPECT_EQ(radius_frames(0.05, 0.02), 3u);
  EXPECT_EQ(radius_frames(0.001, 0.02), 1u);
  EXPECT_THROW(radius_frames(0.0, 0.02), std::invalid_argument);
  EXPECT_THROW(radius_frames(0.04, -1), std::invalid_argument);
}

TEST(Evaluate, Connectives) {
  const auto env = env_of({{"a", "0011"}, {"b", "0101"}});
  EXPECT_EQ(eval("a & b", env), bits("0001"));
  EXPECT_EQ(eval("a | b", env), bits("0111"));
  EXPECT_EQ(eval("a -> b", env), bits("1101"));
  EXPECT_EQ(eval("!a", env), bits("1100"));
}

TEST(Evaluate, NearWindowIsSymmetricAndClipped) {
  const auto env = env_of({{"a", "0000100000"}});
  EXPECT_EQ(eval("N[0.04] a", env), bits("0011111000"));
  EXPECT_EQ(eval("F[0.04] a", env), bits("0011100000"));
  const auto edge = env_of({{"a", "1000000001"}});
  EXPECT_EQ(eval("N[0.02] a", edge), bits("1100000011"));
}

TEST(Evaluate, AlwaysTruncatesAtTraceEnd) {
  const auto env = env_of({{"a", "0111110011"}});
  EXPECT_EQ(eval("G[0.04] a", env), bits("0111000011"));
}

TEST(Evaluate, UntilNeedsLeftUpToWitness) {
  const auto env = env_of({{"a", "1110011000"}, {"b", "0001000100"}});
  // Frame 0: a holds on 0..2, b at 3 within 4 frames.
  EXPECT_EQ(eval("a U[0.08] b", env), bits("1111011100"));
  EXPECT_EQ(eval("a U[0.02] b", env), bits("0011001100"));
}

TEST(Evaluate, UnknownAtomNamesAtomAndSpan) {
  const auto env = env_of({{"a", "01"}});
  try {
    eval("a & missing", env);
    FAIL();
  } catch (const BindingError& e) {
    EXPECT_EQ(e.atom(), "missing");
    EXPECT_EQ(e.span(), (SourceSpan{4, 11}));
  }
}

TEST(Evaluate, EnvironmentRejectsLengthMismatch) {
  TraceEnvironment env(0.02, 4);
  EXPECT_THROW(env.set("a", bits("010")), BindingError);
  EXPECT_THROW(TraceEnvironment(0.0, 3), std::invalid_argument);
}

TEST(Evaluate, MatchesWindowScanOracle) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng() % 80;
    oracle::Env atoms{{"a", oracle::random_runs(rng, n)}, {"b", oracle::random_mask(rng, n, 0.3)}};
    TraceEnvironment env(0.02, n);
    for (const auto& [name, m] : atoms) env.set(name, m);
    const auto f = oracle::random_formula(rng, 4, {"a", "b"});
    ASSERT_EQ(evaluate(f, env), oracle::eval(f, atoms, 0.02)) << format(f);
  }
}

TEST(Evaluate, StatsAreLinear) {
  const auto f = parse_formula("a -> N[0.2] (b & F[0.4] a)");
  for (std::size_t n : {100u, 1000u}) {
    TraceEnvironment env(0.02, n);
    env.set("a", Mask(n, 1));
    env.set("b", Mask(n, 0));
    EvalStats s;
    evaluate(f, env, &s);
    EXPECT_EQ(s.node_visits, node_count(f));
    EXPECT_EQ(s.cell_ops, node_count(f) * n);
  }
}

TEST(Score, ObligationRestricted) {
  const auto s = score_masks(bits("100100"), bits("111100"));
  EXPECT_EQ(s.obligated, 4u);
  EXPECT_EQ(s.satisfied, 2u);
  EXPECT_EQ(s.violated, 2u);
  EXPECT_DOUBLE_EQ(s.score, 0.5);
  const auto empty = score_masks(bits("0101"), bits("0000"));
  EXPECT_EQ(empty.obligated, 0u);
  EXPECT_EQ(empty.score, 1.0);
}

TEST(Score, PartitionOnRandomMasks) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = rng() % 65;
    const auto s = score_masks(oracle::random_mask(rng, n), oracle::random_mask(rng, n));
    ASSERT_EQ(s.satisfied + s.violated, s.obligated);
    ASSERT_GE(s.score, 0.0);
    ASSERT_LE(s.score, 1.0);
  }
}

TEST(Score, ImplicationVacuityCuredByObligation) {
  // Ten frames, one rare onset that is violated.
  const auto env = env_of({{"ref_onset", "0000100000"}, {"pred_onset", "0000000000"}});
  const auto f = parse_formula("ref_onset -> N[0.04] pred_onset");
  EXPECT_DOUBLE_EQ(score_masks(evaluate(f, env), Mask(10, 1)).score, 0.9);
  EXPECT_DOUBLE_EQ(score(f, parse_formula("ref_onset"), env).score, 0.0);
}

TEST(EdgeAtoms, OnsetsAndOffsets) {
  const auto env = derive_edge_atoms(bits("0110011"), bits("1000000"), 0.02);
  EXPECT_EQ(*env.find("ref_onset"), bits("0100010"));
  EXPECT_EQ(*env.find("ref_offset"), bits("0001000"));
  EXPECT_EQ(*env.find("pred_onset"), bits("1000000"));
  EXPECT_EQ(*env.find("pred_offset"), bits("0100000"));
  EXPECT_THROW(derive_edge_atoms(bits("01"), bits("0"), 0.02), std::invalid_argument);
}

TEST(Plan, SharesStructurallyEqualSubtrees) {
  const auto f = parse_formula("N[0.04] (a & b) | !N[0.04] (a & b)");
  const EvaluationPlan plan(f);
  // a, b, a&b, N, !N, |
  EXPECT_EQ(plan.size(), 6u);
  EXPECT_LT(plan.size(), node_count(f));
  std::mt19937_64 rng(5);
  TraceEnvironment env(0.02, 40);
  env.set("a", oracle::random_mask(rng, 40));
  env.set("b", oracle::random_mask(rng, 40));
  EXPECT_EQ(plan.evaluate(env), evaluate(f, env));
}

TEST(Lookahead, SumsAlongPaths) {
  const auto f = parse_formula("a -> N[0.04] F[0.1] b | G[0.02] c");
  EXPECT_DOUBLE_EQ(lookahead(f), 0.14);
  EXPECT_EQ(lookahead_frames(f, 0.02), 7u);
  EXPECT_EQ(lookback_frames(f, 0.02), 2u);
  EXPECT_DOUBLE_EQ(lookahead(parse_formula("a U[0.1] F[0.04] b")), 0.14);
  EXPECT_EQ(lookahead(parse_formula("!a & b")), 0.0);
}
