#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"

using namespace kwb;
using namespace kwb::testing;

namespace {

constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

std::vector<Stroke> three_strokes() {
  return {line(0, 0, 200, 0, 64), line(100, -50, 100, 150, 64), line(0, 150, 200, 150, 64)};
}

}  // namespace

TEST(Hausdorff, Identical) {
  const auto s = line(0, 0, 10, 10, 5);
  EXPECT_EQ(hausdorff(s, s), 0.0);
}

TEST(Hausdorff, SinglePoints) {
  EXPECT_DOUBLE_EQ(hausdorff(Stroke{{{0, 0, 0}}}, Stroke{{{3, 4, 0}}}), 5.0);
}

TEST(Hausdorff, Asymmetric) {
  // Every point of a lies on b, but b's far end is 10 away from a.
  const auto a = line(0, 0, 10, 0, 11);
  const auto b = line(0, 0, 20, 0, 21);
  EXPECT_DOUBLE_EQ(hausdorff(a, b), 10.0);
  EXPECT_DOUBLE_EQ(hausdorff(b, a), 10.0);
}

TEST(Hausdorff, MatchesBruteForce) {
  std::mt19937 rng(31);
  for (int c = 0; c < 300; ++c) {
    const auto a = random_stroke(rng, 1, 64, 250.0);
    const auto b = random_stroke(rng, 1, 64, 250.0);
    EXPECT_NEAR(hausdorff(a, b), brute_hausdorff(a, b), 1e-9);
  }
}

TEST(MatchStrokes, Identity) {
  const auto s = three_strokes();
  const auto m = match_strokes(s, s, 60.0);
  ASSERT_EQ(m.pairs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m.pairs[i], (MatchPair{i, i, 0.0}));
  EXPECT_TRUE(m.unmatched_input.empty());
  EXPECT_TRUE(m.unmatched_model.empty());
}

TEST(MatchStrokes, RecoversPermutation) {
  const auto model = three_strokes();
  const std::vector<Stroke> input = {model[1], model[0], model[2]};
  const auto m = match_strokes(input, model, 60.0);
  ASSERT_EQ(m.pairs.size(), 3u);
  EXPECT_EQ(m.pairs[0].model_index, 1u);
  EXPECT_EQ(m.pairs[1].model_index, 0u);
  EXPECT_EQ(m.pairs[2].model_index, 2u);

  // Same answer as the best of all 3! pairings.
  std::vector<std::vector<double>> cost(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cost[i][j] = brute_hausdorff(input[i], model[j]);
  EXPECT_DOUBLE_EQ(m.total_distance(), brute_min_assignment(cost));
}

TEST(MatchStrokes, MissingStroke) {
  const auto model = three_strokes();
  const std::vector<Stroke> input = {model[0], model[2]};
  const auto m = match_strokes(input, model, 60.0);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].model_index, 0u);
  EXPECT_EQ(m.pairs[1].model_index, 2u);
  ASSERT_EQ(m.unmatched_model.size(), 1u);
  EXPECT_EQ(m.unmatched_model[0], 1u);
}

TEST(MatchStrokes, FarStrokeStaysUnmatched) {
  const auto model = three_strokes();
  auto input = model;
  input.push_back(line(600, 600, 650, 600, 64));
  const auto m = match_strokes(input, model, 60.0);
  EXPECT_EQ(m.pairs.size(), 3u);
  ASSERT_EQ(m.unmatched_input.size(), 1u);
  EXPECT_EQ(m.unmatched_input[0], 3u);
}

TEST(MatchStrokes, ThresholdDemotesPairs) {
  const std::vector<Stroke> model = {line(0, 0, 100, 0, 16)};
  const std::vector<Stroke> input = {line(0, 100, 100, 100, 16)};
  EXPECT_EQ(match_strokes(input, model, 60.0).pairs.size(), 0u);
  EXPECT_EQ(match_strokes(input, model, 100.0).pairs.size(), 1u);
}

TEST(MatchStrokes, EmptyInputRejected) {
  try {
    match_strokes(std::vector<Stroke>{}, three_strokes(), 60.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_sketch);
  }
}

TEST(MatchStrokes, OptimalAgainstBruteForce) {
  std::mt19937 rng(32);
  std::uniform_int_distribution<int> count(1, 6);
  for (int c = 0; c < 200; ++c) {
    std::vector<Stroke> input, model;
    const int ni = count(rng), nm = count(rng);
    for (int i = 0; i < ni; ++i) input.push_back(random_stroke(rng, 1, 12, 250.0));
    for (int j = 0; j < nm; ++j) model.push_back(random_stroke(rng, 1, 12, 250.0));
    std::vector<std::vector<double>> cost(ni, std::vector<double>(nm));
    for (int i = 0; i < ni; ++i)
      for (int j = 0; j < nm; ++j) cost[i][j] = brute_hausdorff(input[i], model[j]);
    const auto m = match_strokes(input, model, kNoThreshold);
    EXPECT_EQ(m.pairs.size(), static_cast<std::size_t>(std::min(ni, nm)));
    EXPECT_EQ(m.total_distance(), brute_min_assignment(cost)) << "case " << c;
  }
}

TEST(MatchStrokes, PermutationInvariantCorrespondence) {
  std::mt19937 rng(33);
  for (int c = 0; c < 50; ++c) {
    std::vector<Stroke> model;
    for (int j = 0; j < 5; ++j) model.push_back(random_stroke(rng, 4, 12, 250.0));
    std::vector<std::size_t> perm = {0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Stroke> input;
    for (auto p : perm) input.push_back(model[p]);
    const auto m = match_strokes(input, model, kNoThreshold);
    ASSERT_EQ(m.pairs.size(), 5u);
    for (const auto& p : m.pairs) EXPECT_EQ(p.model_index, perm[p.input_index]);
  }
}

TEST(StructureMetrics, Ratios) {
  MatchMap full{{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}, {}, {}};
  auto r = structure_metrics(full);
  EXPECT_EQ(r.match_ratio, 1.0);
  EXPECT_EQ(r.valid_ratio, 1.0);
  EXPECT_EQ(r.exist_ratio, 1.0);

  MatchMap missing{{{0, 0, 0}, {1, 2, 0}}, {}, {1}};
  r = structure_metrics(missing);
  EXPECT_DOUBLE_EQ(r.valid_ratio, 2.0 / 3.0);
  EXPECT_EQ(r.exist_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.match_ratio, 2.0 / 3.0);

  MatchMap extra{{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}, {3}, {}};
  r = structure_metrics(extra);
  EXPECT_DOUBLE_EQ(r.exist_ratio, 0.75);
  EXPECT_EQ(r.valid_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.match_ratio, 0.75);
}
