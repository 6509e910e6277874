#pragma once

// Stroke edit, length, closeness, stroke speed and symbol speed.
// Ratios are input over model; std::nullopt marks a pair whose model
// measure is zero (incomparable).

#include <optional>
#include <span>
#include <vector>

#include "kwb/ink.hpp"
#include "kwb/structure.hpp"
#include "kwb/technique.hpp"

namespace kwb {

using Ratio = std::optional<double>;

inline std::size_t assess_edit(const std::optional<SessionEvents>& events) {
  if (!events) return 0;
  validate_events(*events);
  return events->edits.size();  // undo and clear each count once
}

struct LengthCloseness {
  std::vector<Ratio> length_ratios;
  std::vector<double> closeness;
};

inline LengthCloseness assess_length_closeness(const MatchMap& m, std::span<const Stroke> input,
                                               std::span<const Stroke> model) {
  LengthCloseness out;
  for (const auto& p : m.pairs) {
    const auto& in = input[p.input_index];
    const auto& mo = model[p.model_index];
    const double model_length = stroke_path_length(mo);
    out.length_ratios.push_back(model_length > 0.0 ? Ratio(stroke_path_length(in) / model_length) : std::nullopt);
    // Same orientation that the direction check settles on.
    out.closeness.push_back(check_direction(in, mo).best());
  }
  return out;
}

inline LengthCloseness assess_length_closeness(const MatchMap& m, const NormalizedSketch& input,
                                               const Template& model) {
  return assess_length_closeness(m, input.strokes, model.normalized.strokes);
}

inline Ratio duration_ratio(Millis input, Millis model) {
  if (model <= 0) return std::nullopt;
  return static_cast<double>(input) / static_cast<double>(model);
}

struct SpeedResult {
  std::vector<Ratio> stroke_ratios;
  Ratio symbol_ratio;
};

// Durations come from the raw (un-resampled) ink of both sketches.
inline SpeedResult assess_speed(const MatchMap& m, const Sketch& input, const Sketch& model) {
  SpeedResult out;
  for (const auto& p : m.pairs)
    out.stroke_ratios.push_back(duration_ratio(stroke_duration(input.strokes[p.input_index]),
                                               stroke_duration(model.strokes[p.model_index])));
  out.symbol_ratio = duration_ratio(sketch_duration(input), sketch_duration(model));
  return out;
}

inline SpeedResult assess_speed(const MatchMap& m, const Sketch& input, const Template& model) {
  return assess_speed(m, input, model.raw);
}

struct PrecisionResult {
  std::size_t edit_count = 0;
  std::vector<Ratio> length_ratios;
  std::vector<double> closeness_distances;
  std::vector<Ratio> stroke_speed_ratios;
  Ratio symbol_speed_ratio;
};

}  // namespace kwb
