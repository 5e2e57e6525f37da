#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tracecontract/intervals.hpp"

using namespace tracecontract;

namespace {

Mask bits(const std::string& s) {
  Mask m;
  for (char c : s) m.push_back(c == '1');
  return m;
}

std::vector<Interval> random_family(std::mt19937_64& rng, std::size_t count) {
  std::vector<Interval> out;
  double t = 0.0;
  std::uniform_real_distribution<double> gap(0.0, 0.3), len(0.05, 0.6);
  for (std::size_t k = 0; k < count; ++k) {
    t += gap(rng);
    const double l = len(rng);
    out.push_back({t, t + l});
    t += l;
  }
  return out;
}

}  // namespace

TEST(Intervals, ExtractRuns) {
  const auto iv = extract_intervals(bits("0110001"), 0.5);
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_EQ(iv[0], (Interval{0.5, 1.5}));
  EXPECT_EQ(iv[1], (Interval{3.0, 3.5}));
  EXPECT_TRUE(extract_intervals(bits("0000"), 0.02).empty());
}

TEST(Intervals, MergeGap) {
  EXPECT_EQ(extract_intervals(bits("1101011"), 1.0, 1.0).size(), 1u);
  EXPECT_EQ(extract_intervals(bits("1100011"), 1.0, 2.0).size(), 2u);
  EXPECT_THROW(extract_intervals(bits("1"), 1.0, -1.0), std::invalid_argument);
}

TEST(Intervals, RasterizeRoundTrip) {
  const std::vector<Interval> ev{{0.2, 0.4}, {1.0, 1.5}};
  const auto m = rasterize(ev, 100, 0.02);
  EXPECT_EQ(extract_intervals(m, 0.02).size(), 2u);
  const auto back = extract_intervals(m, 0.02);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    EXPECT_NEAR(back[k].start, ev[k].start, 1e-12);
    EXPECT_NEAR(back[k].end, ev[k].end, 1e-12);
  }
  EXPECT_THROW(rasterize({{1.9, 2.1}}, 100, 0.02), std::out_of_range);
}

TEST(Candidates, OverlapAndEndpointReach) {
  const std::vector<Interval> refs{{1.0, 2.0}};
  // Overlaps, start within 3 eps.
  EXPECT_EQ(candidates(refs, {{1.1, 3.0}}, 0.04).size(), 1u);
  // Overlaps, neither endpoint within 0.12.
  EXPECT_EQ(candidates(refs, {{1.2, 1.6}}, 0.04).size(), 0u);
  // Touching is not overlapping.
  EXPECT_EQ(candidates(refs, {{2.0, 2.1}}, 0.04).size(), 0u);
  EXPECT_THROW(candidates(refs, refs, 0.0), std::invalid_argument);
}

TEST(Candidates, Cost) {
  const auto c = candidates({{1.0, 1.5}}, {{1.06, 2.18}}, 0.04);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].cost, 0.06 + 0.68 - 0.44, 1e-12);
}

TEST(Matching, GreedyTakesCheapestFirst) {
  // Bridge geometry: greedy uses the bridge on the first event.
  const std::vector<Interval> refs{{1.0, 1.5}, {1.8, 2.3}};
  const std::vector<Interval> preds{{1.0, 1.04}, {1.06, 2.18}};
  const auto c = candidates(refs, preds, 0.04);
  EXPECT_EQ(c.size(), 3u);
  const auto g = match_greedy(c);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.index_pairs()[0], (std::pair<std::size_t, std::size_t>{0, 1}));
  const auto e = match_exact(c);
  EXPECT_EQ(e.size(), 2u);
  EXPECT_EQ(e.index_pairs(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
}

TEST(Matching, ExactBoundEnforced) {
  std::vector<Interval> many;
  for (int k = 0; k < 30; ++k) many.push_back({k * 1.0, k * 1.0 + 0.5});
  const auto c = candidates(many, many, 0.04);
  EXPECT_THROW(match_exact(c, 24), MatcherBoundError);
  EXPECT_EQ(match_exact(c, 30).size(), 30u);
  EXPECT_EQ(match(c, MatcherPolicy::greedy, 24).size(), 30u);
}

TEST(Matching, EmptyInputs) {
  EXPECT_EQ(match_exact({}).size(), 0u);
  EXPECT_EQ(match_greedy({}).size(), 0u);
}

TEST(Matching, PolicyNames) {
  EXPECT_EQ(parse_policy("exact"), MatcherPolicy::exact);
  EXPECT_THROW(parse_policy("hungarian"), std::invalid_argument);
}

TEST(Matching, ExactEqualsBruteForce) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 2000; ++k) {
    const auto refs = random_family(rng, rng() % 5);
    const auto preds = random_family(rng, rng() % 5);
    const double eps = std::uniform_real_distribution<double>(0.01, 0.2)(rng);
    const auto c = candidates(refs, preds, eps);
    const auto e = match_exact(c);
    const auto b = oracle::brute_force_matching(c);
    ASSERT_EQ(e.size(), b.cardinality);
    ASSERT_NEAR(e.total_cost(), b.cost, 1e-9);
    const auto g = match_greedy(c);
    ASSERT_LE(g.size(), e.size());
  }
}
