#pragma once

// The assessment pipeline: input normalization and frame alignment,
// stroke matching, the ten metrics, star scoring, report and quiz summary.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kwb/error.hpp"
#include "kwb/ink.hpp"
#include "kwb/normalize.hpp"
#include "kwb/precision.hpp"
#include "kwb/structure.hpp"
#include "kwb/technique.hpp"
#include "kwb/template_store.hpp"
#include "kwb/thresholds.hpp"

namespace kwb {

// ---------------------------------------------------------------------------
// Star scoring

inline int score_metric(MetricId id, std::optional<double> raw, const ThresholdConfig& cfg) {
  if (!raw || !std::isfinite(*raw)) return 1;
  const double v = *raw;
  return std::visit(
      [v](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RatioCutoffs>) {
          if (v >= c.three_star_min) return 3;
          if (v >= c.two_star_min) return 2;
          return 1;
        } else if constexpr (std::is_same_v<T, BandCutoffs>) {
          if (v >= c.three_star_lo && v <= c.three_star_hi) return 3;
          if (v >= c.two_star_lo && v <= c.two_star_hi) return 2;
          return 1;
        } else {
          if (v <= c.three_star_max) return 3;
          if (v <= c.two_star_max) return 2;
          return 1;
        }
      },
      cfg.cutoffs_for(id));
}

inline int score_metric(std::string_view id, std::optional<double> raw, const ThresholdConfig& cfg) {
  auto metric = metric_from_string(id);
  if (!metric) throw Error(ErrorKind::argument, "unknown metric id", std::string(id));
  return score_metric(*metric, raw, cfg);
}

// Mean over comparable pairs; nullopt when none are comparable.
inline std::optional<double> mean_of(std::span<const Ratio> values) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& v : values)
    if (v) {
      total += *v;
      ++count;
    }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

inline std::optional<double> mean_of(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Input frame alignment

enum class InputFrame { bounding_box, canvas, refined };

inline constexpr std::string_view to_string(InputFrame f) {
  switch (f) {
    case InputFrame::bounding_box: return "bounding_box";
    case InputFrame::canvas: return "canvas";
    case InputFrame::refined: return "refined";
  }
  return "unknown";
}

struct AlignedInput {
  NormalizedSketch sketch;  // input strokes in the template's normalized frame
  MatchMap match;
  InputFrame frame = InputFrame::bounding_box;
};

namespace detail {

inline bool better_alignment(const MatchMap& a, const MatchMap& b) {
  if (a.pairs.size() != b.pairs.size()) return a.pairs.size() > b.pairs.size();
  const double ca = a.total_distance(), cb = b.total_distance();
  return ca < cb - 1e-9 * (1.0 + cb);
}

inline std::optional<BoundingBox> matched_box(std::span<const Stroke> strokes, const MatchMap& m, bool input_side) {
  std::vector<Stroke> picked;
  for (const auto& p : m.pairs) picked.push_back(strokes[input_side ? p.input_index : p.model_index]);
  if (picked.empty()) return std::nullopt;
  return bounding_box(std::span<const Stroke>(picked));
}

}  // namespace detail

// Candidate frames, best match wins (more pairs, then lower total cost;
// ties keep the earlier candidate):
//  1. the input's own bounding-box normalization;
//  2. the canvas frame: input canvas mapped onto the template canvas, then
//     the template's stored normalization transform;
//  3. the better of (1)/(2) refined so the matched input strokes' box
//     lands on the matched model strokes' box.
inline AlignedInput align_and_match(const Sketch& input, const Template& model, const ThresholdConfig& cfg) {
  if (input.strokes.empty()) throw Error(ErrorKind::empty_sketch, "empty sketch", "strokes");
  if (cfg.resample_n != model.normalized.resample_count || cfg.scale_size != model.normalized.size)
    throw Error(ErrorKind::config, "threshold config frame (resampleCount/scaleSize) differs from the template store");

  const auto& model_strokes = model.normalized.strokes;

  AlignedInput best;
  best.sketch = normalize(input, cfg.resample_n, cfg.scale_size);
  best.match = match_strokes(best.sketch.strokes, model_strokes, cfg.match_threshold);
  best.frame = InputFrame::bounding_box;

  std::vector<Stroke> resampled;
  resampled.reserve(input.strokes.size());
  for (const auto& s : input.strokes) resampled.push_back(resample(s, cfg.resample_n));

  const auto candidate = [&](const FrameTransform& t, InputFrame frame) {
    AlignedInput c;
    c.sketch = best.sketch;
    c.sketch.strokes = t.apply(resampled);
    c.sketch.transform = t;
    c.sketch.degenerate = false;
    c.match = match_strokes(c.sketch.strokes, model_strokes, cfg.match_threshold);
    c.frame = frame;
    return c;
  };

  {
    const auto& im = input.metadata;
    const auto& tm = model.raw.metadata;
    FrameTransform t = model.normalized.transform;
    if (im.canvas_width != tm.canvas_width || im.canvas_height != tm.canvas_height) {
      const double k = std::min(tm.canvas_width / im.canvas_width, tm.canvas_height / im.canvas_height);
      const double ox = 0.5 * tm.canvas_width - k * 0.5 * im.canvas_width;
      const double oy = 0.5 * tm.canvas_height - k * 0.5 * im.canvas_height;
      t = {k * t.scale, t.shift_x - ox * t.scale, t.shift_y - oy * t.scale};
    }
    auto c = candidate(t, InputFrame::canvas);
    if (detail::better_alignment(c.match, best.match)) best = std::move(c);
  }

  const auto in_box = detail::matched_box(best.sketch.strokes, best.match, true);
  const auto mo_box = detail::matched_box(model_strokes, best.match, false);
  if (in_box && mo_box) {
    const double di = std::hypot(in_box->width, in_box->height);
    const double dm = std::hypot(mo_box->width, mo_box->height);
    const double r = (di > 0.0 && dm > 0.0) ? dm / di : 1.0;
    const double cix = in_box->min_x + 0.5 * in_box->width, ciy = in_box->min_y + 0.5 * in_box->height;
    const double cmx = mo_box->min_x + 0.5 * mo_box->width, cmy = mo_box->min_y + 0.5 * mo_box->height;
    const auto& t = best.sketch.transform;
    const FrameTransform refined{t.scale * r, t.shift_x * r + cix * r - cmx, t.shift_y * r + ciy * r - cmy};
    auto c = candidate(refined, InputFrame::refined);
    if (detail::better_alignment(c.match, best.match)) best = std::move(c);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Report

struct MetricEntry {
  MetricId id = MetricId::stroke_match;
  std::optional<double> raw;
  std::vector<Ratio> per_pair;  // list-valued precision metrics
  std::vector<bool> flags;      // order / direction
  int stars = 1;
};

struct OverlayStroke {
  std::size_t input_index = 0;
  std::vector<std::string> tags;
};

struct Overlay {
  std::vector<OverlayStroke> strokes;
  std::vector<std::size_t> missing_model;
};

inline const std::vector<std::pair<std::string, std::string>>& color_key() {
  static const std::vector<std::pair<std::string, std::string>> key = {
      {"matched", "green"},     {"missing", "gray"},           {"extraneous", "red"},
      {"order-wrong", "orange"}, {"direction-wrong", "purple"},
  };
  return key;
}

struct AssessmentReport {
  std::string label;
  InputFrame frame = InputFrame::bounding_box;
  std::array<MetricEntry, kMetricCount> metrics;
  StructureResult structure;
  TechniqueResult technique;
  PrecisionResult precision;
  Overlay overlay;

  const MetricEntry& metric(MetricId id) const { return metrics[index_of(id)]; }
  const MatchMap& match_map() const noexcept { return structure.match_map; }
};

inline AssessmentReport build_report(const std::string& label, const StructureResult& structure,
                                     const TechniqueResult& technique, const PrecisionResult& precision,
                                     const ThresholdConfig& cfg) {
  AssessmentReport r;
  r.label = label;
  r.structure = structure;
  r.technique = technique;
  r.precision = precision;

  const auto set = [&](MetricId id, std::optional<double> raw) {
    auto& e = r.metrics[index_of(id)];
    e.id = id;
    e.raw = raw;
    e.stars = score_metric(id, raw, cfg);
    return std::ref(e);
  };
  set(MetricId::stroke_match, structure.match_ratio);
  set(MetricId::stroke_valid, structure.valid_ratio);
  set(MetricId::stroke_exist, structure.exist_ratio);
  set(MetricId::stroke_order, technique.order_ratio).get().flags = technique.order_correct;
  set(MetricId::stroke_direction, technique.direction_ratio).get().flags = technique.direction_correct;
  set(MetricId::stroke_edit, static_cast<double>(precision.edit_count));
  set(MetricId::stroke_length, mean_of(std::span<const Ratio>(precision.length_ratios))).get().per_pair =
      precision.length_ratios;
  {
    auto& e = set(MetricId::stroke_closeness, mean_of(std::span<const double>(precision.closeness_distances))).get();
    e.per_pair.assign(precision.closeness_distances.begin(), precision.closeness_distances.end());
  }
  set(MetricId::stroke_speed, mean_of(std::span<const Ratio>(precision.stroke_speed_ratios))).get().per_pair =
      precision.stroke_speed_ratios;
  set(MetricId::symbol_speed, precision.symbol_speed_ratio);

  const auto& m = structure.match_map;
  std::vector<const MatchPair*> by_input(m.input_count(), nullptr);
  std::vector<std::size_t> pair_slot(m.input_count(), 0);
  for (std::size_t k = 0; k < m.pairs.size(); ++k) {
    by_input[m.pairs[k].input_index] = &m.pairs[k];
    pair_slot[m.pairs[k].input_index] = k;
  }
  // Order flags are indexed by pairs sorted on input index, which is how
  // MatchMap stores them.
  for (std::size_t i = 0; i < by_input.size(); ++i) {
    OverlayStroke s{i, {}};
    if (by_input[i]) {
      s.tags.push_back("matched");
      const auto k = pair_slot[i];
      if (!technique.order_correct[k]) s.tags.push_back("order-wrong");
      if (!technique.direction_correct[k]) s.tags.push_back("direction-wrong");
    } else {
      s.tags.push_back("extraneous");
    }
    r.overlay.strokes.push_back(std::move(s));
  }
  r.overlay.missing_model = m.unmatched_model;
  return r;
}

// normalize -> align/match -> structure -> technique -> precision -> stars
inline AssessmentReport assess_character(const Sketch& input, const std::optional<SessionEvents>& events,
                                         const Template& model, const ThresholdConfig& cfg) {
  validate(input);
  if (events) validate_events(*events);
  auto aligned = align_and_match(input, model, cfg);
  const auto structure = structure_metrics(aligned.match);
  const auto technique = assess_technique(aligned.match, aligned.sketch.strokes, model.normalized.strokes);

  PrecisionResult precision;
  precision.edit_count = assess_edit(events);
  auto lc = assess_length_closeness(aligned.match, aligned.sketch.strokes, model.normalized.strokes);
  precision.length_ratios = std::move(lc.length_ratios);
  precision.closeness_distances = std::move(lc.closeness);
  auto speed = assess_speed(aligned.match, input, model.raw);
  precision.stroke_speed_ratios = std::move(speed.stroke_ratios);
  precision.symbol_speed_ratio = speed.symbol_ratio;

  auto report = build_report(model.label, structure, technique, precision, cfg);
  report.frame = aligned.frame;
  return report;
}

// Looks the template up by `label`; edit events come from the ink itself.
inline AssessmentReport assess_character(const TemplateStore& store, const Sketch& input, const std::string& label,
                                         const ThresholdConfig& cfg) {
  const auto& model = store.lookup_template(label);
  return assess_character(input, input.events, model, cfg);
}

inline AssessmentReport assess_character(const TemplateStore& store, const Sketch& input, const ThresholdConfig& cfg) {
  return assess_character(store, input, input.metadata.label, cfg);
}

namespace detail {

inline nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json match_map_to_json(const MatchMap& m) {
  nlohmann::ordered_json j;
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : m.pairs) {
    nlohmann::ordered_json jp;
    jp["inputIndex"] = p.input_index;
    jp["modelIndex"] = p.model_index;
    jp["distance"] = p.distance;
    j["pairs"].push_back(std::move(jp));
  }
  j["unmatchedInput"] = m.unmatched_input;
  j["unmatchedModel"] = m.unmatched_model;
  return j;
}

inline nlohmann::ordered_json report_to_json(const AssessmentReport& r) {
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["frame"] = std::string(to_string(r.frame));
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& e : r.metrics) {
    nlohmann::ordered_json je;
    je["id"] = std::string(to_string(e.id));
    if (e.id == MetricId::stroke_edit && e.raw)
      je["raw"] = static_cast<std::int64_t>(*e.raw);
    else
      je["raw"] = detail::optional_number(e.raw);
    je["stars"] = e.stars;
    switch (e.id) {
      case MetricId::stroke_order:
      case MetricId::stroke_direction:
        je["flags"] = e.flags;
        break;
      case MetricId::stroke_length:
      case MetricId::stroke_closeness:
      case MetricId::stroke_speed: {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& v : e.per_pair) arr.push_back(detail::optional_number(v));
        je["perPair"] = std::move(arr);
        break;
      }
      default:
        break;
    }
    j["metrics"].push_back(std::move(je));
  }
  j["matchMap"] = match_map_to_json(r.match_map());
  auto& overlay = j["overlay"];
  overlay["strokes"] = nlohmann::ordered_json::array();
  for (const auto& s : r.overlay.strokes) {
    nlohmann::ordered_json js;
    js["inputIndex"] = s.input_index;
    js["tags"] = s.tags;
    overlay["strokes"].push_back(std::move(js));
  }
  overlay["missing"] = nlohmann::ordered_json::array();
  for (auto k : r.overlay.missing_model) {
    nlohmann::ordered_json jm;
    jm["modelIndex"] = k;
    jm["tags"] = {"missing"};
    overlay["missing"].push_back(std::move(jm));
  }
  overlay["colorKey"] = nlohmann::ordered_json::object();
  for (const auto& [tag, color] : color_key()) overlay["colorKey"][tag] = color;
  return j;
}

inline std::string serialize_report(const AssessmentReport& r) { return report_to_json(r).dump(); }

// ---------------------------------------------------------------------------
// Quiz summary

struct QuizEntry {
  std::string label;
  std::array<int, kMetricCount> stars{};
  std::array<std::optional<double>, kMetricCount> raw{};
};

struct QuizReport {
  std::string lesson_id;
  std::vector<QuizEntry> entries;
  std::array<double, kMetricCount> metric_means{};
  double overall_mean = 0.0;
};

// Half-up rounding to one decimal for display. The epsilon absorbs binary
// representation error of values like 2.25.
inline double round_display(double v) { return std::floor(v * 10.0 + 0.5 + 1e-9) / 10.0; }

inline QuizReport quiz_summary(const std::string& lesson_id, std::span<const AssessmentReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::argument, "quiz summary needs at least one report");
  QuizReport q;
  q.lesson_id = lesson_id;
  std::array<double, kMetricCount> sums{};
  double overall = 0.0;
  for (const auto& r : reports) {
    QuizEntry e;
    e.label = r.label;
    for (auto id : kAllMetrics) {
      const auto k = index_of(id);
      e.stars[k] = r.metrics[k].stars;
      e.raw[k] = r.metrics[k].raw;
      sums[k] += r.metrics[k].stars;
      overall += r.metrics[k].stars;
    }
    q.entries.push_back(std::move(e));
  }
  const auto n = static_cast<double>(reports.size());
  for (std::size_t k = 0; k < kMetricCount; ++k) q.metric_means[k] = sums[k] / n;
  q.overall_mean = overall / (n * static_cast<double>(kMetricCount));
  return q;
}

inline nlohmann::ordered_json quiz_report_to_json(const QuizReport& q) {
  nlohmann::ordered_json j;
  j["lessonId"] = q.lesson_id;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : q.entries) {
    nlohmann::ordered_json je;
    je["label"] = e.label;
    je["stars"] = nlohmann::ordered_json::object();
    je["raw"] = nlohmann::ordered_json::object();
    for (auto id : kAllMetrics) {
      je["stars"][std::string(to_string(id))] = e.stars[index_of(id)];
      je["raw"][std::string(to_string(id))] = detail::optional_number(e.raw[index_of(id)]);
    }
    j["entries"].push_back(std::move(je));
  }
  j["metricMeans"] = nlohmann::ordered_json::array();
  for (auto id : kAllMetrics) {
    nlohmann::ordered_json jm;
    jm["id"] = std::string(to_string(id));
    jm["mean"] = q.metric_means[index_of(id)];
    jm["display"] = round_display(q.metric_means[index_of(id)]);
    j["metricMeans"].push_back(std::move(jm));
  }
  j["overallMean"] = q.overall_mean;
  j["overallDisplay"] = round_display(q.overall_mean);
  return j;
}

}  // namespace kwb
