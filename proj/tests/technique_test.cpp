#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"

using namespace kwb;
using namespace kwb::testing;

namespace {

MatchMap pairs_for(const std::vector<std::size_t>& model_indices) {
  MatchMap m;
  for (std::size_t i = 0; i < model_indices.size(); ++i) m.pairs.push_back({i, model_indices[i], 0.0});
  return m;
}

// Mean of the start-start and end-end gaps: what an endpoint-only check sees.
double endpoint_distance(const Stroke& a, const Stroke& b) {
  const auto d = [](const Point& p, const Point& q) { return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)); };
  return (d(a.front(), b.front()) + d(a.back(), b.back())) / 2.0;
}

double oracle_path_distance(const Stroke& a, const Stroke& b) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i)
    total += std::hypot(static_cast<long double>(a.points[i].x - b.points[i].x),
                        static_cast<long double>(a.points[i].y - b.points[i].y));
  return static_cast<double>(total / a.size());
}

}  // namespace

TEST(PathDistance, Identical) {
  const auto s = line(0, 0, 10, 5, 8);
  EXPECT_EQ(path_distance(s, s), 0.0);
}

TEST(PathDistance, Shifted) {
  const auto a = line(0, 0, 40, 10, 16);
  const auto b = line(3, 4, 43, 14, 16);
  EXPECT_NEAR(path_distance(a, b), 5.0, 1e-12);
}

TEST(PathDistance, UnequalCountsRejected) {
  try {
    path_distance(line(0, 0, 1, 1, 3), line(0, 0, 1, 1, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::argument);
  }
}

TEST(PathDistance, MatchesIndependentSum) {
  std::mt19937 rng(41);
  for (int c = 0; c < 100; ++c) {
    const auto a = random_stroke(rng, 64, 64, 250.0);
    const auto b = random_stroke(rng, 64, 64, 250.0);
    EXPECT_NEAR(path_distance(a, b), oracle_path_distance(a, b), 1e-9);
  }
}

TEST(Direction, IdentityAllCorrect) {
  const std::vector<Stroke> model = {line(0, 0, 200, 0, 64), line(100, 0, 100, 200, 64)};
  const auto flags = assess_direction(pairs_for({0, 1}), model, model);
  EXPECT_EQ(flags, (std::vector<bool>{true, true}));
}

TEST(Direction, ReversedStrokeFlagged) {
  const std::vector<Stroke> model = {line(0, 0, 200, 0, 64), line(100, 0, 100, 200, 64), line(0, 200, 200, 200, 64)};
  auto input = model;
  input[1] = reversed(input[1]);
  const auto flags = assess_direction(pairs_for({0, 1, 2}), input, model);
  EXPECT_EQ(flags, (std::vector<bool>{true, false, true}));
}

TEST(Direction, LoopWrittenBackwardsBeatsEndpointCheck) {
  // A near-closed loop whose ends almost meet. The attempt starts and ends
  // where the model does but travels the loop the other way round.
  const Stroke model_raw{{{0, 0, 0}, {60, 100, 10}, {-60, 100, 20}, {2, 0, 30}}};
  const Stroke input_raw{{{0, 0, 0}, {-60, 100, 10}, {60, 100, 20}, {2, 0, 30}}};
  const auto model = resample(model_raw, 64);
  const auto input = resample(input_raw, 64);

  const double end_fwd = endpoint_distance(input, model);
  const double end_rev = endpoint_distance(reversed(input), model);
  EXPECT_LE(std::abs(end_fwd - end_rev), 2.0);
  EXPECT_LE(end_fwd, end_rev);  // an endpoint-only check calls it correct

  const double path_fwd = oracle_path_distance(input, model);
  const double path_rev = oracle_path_distance(reversed(input), model);
  EXPECT_GT(path_fwd - path_rev, 20.0);

  const auto check = check_direction(input, model);
  EXPECT_FALSE(check.correct());
  EXPECT_NEAR(check.forward, path_fwd, 1e-9);
  EXPECT_NEAR(check.backward, path_rev, 1e-9);
}

TEST(Order, InOrder) { EXPECT_EQ(assess_order(pairs_for({0, 1, 2})), (std::vector<bool>{true, true, true})); }

TEST(Order, FirstTwoSwapped) {
  EXPECT_EQ(assess_order(pairs_for({1, 0, 2})), (std::vector<bool>{false, false, true}));
}

TEST(Order, Rotated) {
  const std::vector<std::size_t> written = {2, 0, 1};
  auto sorted = written;
  std::sort(sorted.begin(), sorted.end());
  std::vector<bool> expected;
  for (std::size_t k = 0; k < written.size(); ++k) expected.push_back(written[k] == sorted[k]);
  EXPECT_EQ(expected, (std::vector<bool>{false, false, false}));
  EXPECT_EQ(assess_order(pairs_for(written)), expected);
}

TEST(Order, MissingStrokeDoesNotCountAgainstOrder) {
  MatchMap m{{{0, 0, 0}, {1, 2, 0}}, {}, {1}};
  EXPECT_EQ(assess_order(m), (std::vector<bool>{true, true}));
}

TEST(Technique, Ratios) {
  const std::vector<Stroke> model = {line(0, 0, 200, 0, 64), line(100, 0, 100, 200, 64), line(0, 200, 200, 200, 64)};
  const std::vector<Stroke> input = {model[1], reversed(model[0]), model[2]};
  const auto m = match_strokes(input, model, 60.0);
  const auto r = assess_technique(m, input, model);
  EXPECT_DOUBLE_EQ(r.order_ratio, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.direction_ratio, 2.0 / 3.0);
  EXPECT_EQ(fraction_true({}), 0.0);
}
