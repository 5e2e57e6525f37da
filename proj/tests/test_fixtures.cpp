#include <gtest/gtest.h>

#include "tracecontract/contract_file.hpp"
#include "tracecontract/fixtures.hpp"

using namespace tracecontract;

namespace {

using Span = detail::Run;

std::vector<Span> runs(const Mask& m) { return detail::runs_of(m); }

}  // namespace

TEST(MakeTrace, HalfOpenFrames) {
  const auto m = make_trace({{1.0, 2.0}}, 150, 0.02);
  const auto r = runs(m);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (Span{50, 100}));
}

TEST(Pathology, NamesRoundTrip) {
  for (int k = 0; k <= static_cast<int>(PathologyKind::nominal); ++k) {
    const auto kind = static_cast<PathologyKind>(k);
    EXPECT_EQ(parse_pathology(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_pathology("jitter"), std::invalid_argument);
}

TEST(Pathology, ShiftsMoveOnlyTheirEdge) {
  const auto ref = make_trace({{1.0, 2.0}}, 150, 0.02);
  auto edges = [&](PathologyKind k) { return runs(apply_pathology(ref, {k, 0.1, 0}, 0.02)).at(0); };
  EXPECT_EQ(edges(PathologyKind::late_onset), (Span{55, 100}));
  EXPECT_EQ(edges(PathologyKind::early_onset), (Span{45, 100}));
  EXPECT_EQ(edges(PathologyKind::late_release), (Span{50, 105}));
  EXPECT_EQ(edges(PathologyKind::early_release), (Span{50, 95}));
  EXPECT_EQ(edges(PathologyKind::length_distortion), (Span{55, 95}));
}

TEST(Pathology, LateReleaseLeavesOnsetGuardIntact) {
  const auto ref = make_trace({{1.0, 2.0}}, 150, 0.02);
  const auto contract = default_contract(0.04);
  for (double mag : {0.02, 0.1, 0.4, 0.8}) {
    const auto pred = apply_pathology(ref, {PathologyKind::late_release, mag, 0}, 0.02);
    const auto r = monitor(contract, ref, pred, 0.02);
    EXPECT_EQ(r.guards["onset_guard"], 1.0) << mag;
    EXPECT_EQ(r.guards["missing_guard"], 1.0) << mag;
    if (mag > 0.04) EXPECT_EQ(r.guards["offset_guard"], 0.0) << mag;
  }
}

TEST(Pathology, MissingDropsSeededSubset) {
  const auto ref = make_trace({{0.2, 0.4}, {0.8, 1.0}, {1.4, 1.6}, {2.0, 2.2}}, 150, 0.02);
  EXPECT_TRUE(runs(apply_pathology(ref, {PathologyKind::missing, 0, 0}, 0.02)).empty());
  const auto a = apply_pathology(ref, {PathologyKind::missing, 2, 7}, 0.02);
  EXPECT_EQ(runs(a).size(), 2u);
  EXPECT_EQ(a, apply_pathology(ref, {PathologyKind::missing, 2, 7}, 0.02));
  bool differs = false;
  for (std::uint64_t s = 0; s < 8 && !differs; ++s)
    differs = apply_pathology(ref, {PathologyKind::missing, 2, s}, 0.02) != a;
  EXPECT_TRUE(differs);
  EXPECT_THROW(apply_pathology(ref, {PathologyKind::missing, 1.5, 0}, 0.02), std::invalid_argument);
}

TEST(Pathology, ExtraLandsInWidestGap) {
  const auto ref = make_trace({{1.0, 2.0}}, 150, 0.02);
  const auto pred = apply_pathology(ref, {PathologyKind::extra, 0.2, 0}, 0.02);
  const auto r = runs(pred);
  ASSERT_EQ(r.size(), 2u);
  // Gaps are [0,50) and [100,150); the first wins the tie.
  EXPECT_EQ(r[0], (Span{20, 30}));
  EXPECT_THROW(apply_pathology(ref, {PathologyKind::extra, 2.0, 0}, 0.02), std::out_of_range);
}

TEST(Pathology, SilenceBleedFlanksEachRun) {
  const auto ref = make_trace({{1.0, 2.0}}, 150, 0.02);
  const auto r = runs(apply_pathology(ref, {PathologyKind::silence_bleed, 0.04, 0}, 0.02));
  EXPECT_EQ(r, (std::vector<Span>{{46, 48}, {50, 100}, {102, 104}}));
}

TEST(Pathology, FragmentationCount) {
  const auto t = fragmented_trace();
  EXPECT_EQ(runs(t.pred).size(), 3u);
  EXPECT_THROW(apply_pathology(t.ref, {PathologyKind::fragmentation, 0, 0}, 0.02), std::invalid_argument);
  EXPECT_THROW(apply_pathology(t.ref, {PathologyKind::fragmentation, 40, 0}, 0.02), std::invalid_argument);
}

TEST(Pathology, NegativeMagnitudeRejected) {
  const auto ref = make_trace({{1.0, 2.0}}, 150, 0.02);
  EXPECT_THROW(apply_pathology(ref, {PathologyKind::late_onset, -0.1, 0}, 0.02), std::invalid_argument);
  EXPECT_THROW(apply_pathology(ref, {PathologyKind::early_release, 1.0, 0}, 0.02), std::invalid_argument);
}

TEST(Stress, BridgeGeometry) {
  const auto t = bridge_trace();
  // Reference runs [50,75) and [90,115); bridge_left with m = 3.
  EXPECT_EQ(runs(t.ref), (std::vector<Span>{{50, 75}, {90, 115}}));
  EXPECT_EQ(runs(t.pred), (std::vector<Span>{{50, 52}, {53, 109}}));
}

TEST(Stress, SplitGapAtSixtyPercent) {
  const auto t = split_trace();
  EXPECT_EQ(runs(t.pred), (std::vector<Span>{{50, 65}, {67, 75}, {90, 105}, {107, 115}}));
}

TEST(Stress, FamilyShapeAndDeterminism) {
  const auto fam = stress_family();
  EXPECT_EQ(fam.size(), 13u);
  EXPECT_EQ(fam.front().id, "nominal_0");
  EXPECT_EQ(fam.front().pred, fam.front().ref);
  const auto again = stress_family();
  for (std::size_t k = 0; k < fam.size(); ++k) {
    EXPECT_EQ(fam[k].id, again[k].id);
    EXPECT_EQ(fam[k].pred, again[k].pred);
  }
}

TEST(Calibration, NineRankedCases) {
  const auto cases = calibration_cases();
  ASSERT_EQ(cases.size(), 9u);
  for (std::size_t k = 1; k < cases.size(); ++k) EXPECT_LE(cases[k - 1].risk, cases[k].risk);
  EXPECT_TRUE(runs(cases[6].pred).empty());
  for (const auto& c : cases) EXPECT_EQ(c.ref.size(), kFixtureFrames);
}
