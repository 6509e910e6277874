#pragma once

// Stroke order and stroke direction over matched pairs.

#include <algorithm>
#include <span>
#include <vector>

#include "kwb/error.hpp"
#include "kwb/ink.hpp"
#include "kwb/structure.hpp"

namespace kwb {

// Mean distance between points at equal indices.
inline double path_distance(const Stroke& a, const Stroke& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::argument, "path distance needs equal point counts");
  if (a.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += distance(a.points[i], b.points[i]);
  return total / static_cast<double>(a.size());
}

struct DirectionCheck {
  double forward = 0.0;
  double backward = 0.0;
  bool correct() const noexcept { return forward <= backward; }
  double best() const noexcept { return std::min(forward, backward); }
};

inline DirectionCheck check_direction(const Stroke& input, const Stroke& model) {
  return {path_distance(input, model), path_distance(reversed(input), model)};
}

// Whole-path comparison: the pair is written in the right direction when
// the input as written is at least as close to the model as its reversal.
inline std::vector<bool> assess_direction(const MatchMap& m, std::span<const Stroke> input,
                                          std::span<const Stroke> model) {
  std::vector<bool> out;
  out.reserve(m.pairs.size());
  for (const auto& p : m.pairs) out.push_back(check_direction(input[p.input_index], model[p.model_index]).correct());
  return out;
}

inline std::vector<bool> assess_direction(const MatchMap& m, const NormalizedSketch& input, const Template& model) {
  return assess_direction(m, input.strokes, model.normalized.strokes);
}

// Pairs in input order; pair k is correct when its model index equals the
// k-th smallest matched model index.
inline std::vector<bool> assess_order(const MatchMap& m) {
  auto pairs = m.pairs;
  std::sort(pairs.begin(), pairs.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.input_index < b.input_index; });
  std::vector<std::size_t> sorted;
  sorted.reserve(pairs.size());
  for (const auto& p : pairs) sorted.push_back(p.model_index);
  std::sort(sorted.begin(), sorted.end());
  std::vector<bool> out;
  out.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) out.push_back(pairs[k].model_index == sorted[k]);
  return out;
}

struct TechniqueResult {
  std::vector<bool> order_correct;
  std::vector<bool> direction_correct;
  double order_ratio = 0.0;
  double direction_ratio = 0.0;
};

inline double fraction_true(const std::vector<bool>& flags) {
  if (flags.empty()) return 0.0;
  return static_cast<double>(std::count(flags.begin(), flags.end(), true)) / static_cast<double>(flags.size());
}

inline TechniqueResult assess_technique(const MatchMap& m, std::span<const Stroke> input,
                                        std::span<const Stroke> model) {
  TechniqueResult r;
  r.order_correct = assess_order(m);
  r.direction_correct = assess_direction(m, input, model);
  r.order_ratio = fraction_true(r.order_correct);
  r.direction_ratio = fraction_true(r.direction_correct);
  return r;
}

}  // namespace kwb
