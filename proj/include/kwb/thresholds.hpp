#pragma once

// Metric identifiers and the tunable cutoffs that turn raw metric values
// into one to three stars.

#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "kwb/error.hpp"

namespace kwb {

enum class MetricId : std::size_t {
  stroke_match,
  stroke_valid,
  stroke_exist,
  stroke_order,
  stroke_direction,
  stroke_edit,
  stroke_length,
  stroke_closeness,
  stroke_speed,
  symbol_speed,
};

inline constexpr std::size_t kMetricCount = 10;

inline constexpr std::array<MetricId, kMetricCount> kAllMetrics = {
    MetricId::stroke_match,  MetricId::stroke_valid,     MetricId::stroke_exist,
    MetricId::stroke_order,  MetricId::stroke_direction, MetricId::stroke_edit,
    MetricId::stroke_length, MetricId::stroke_closeness, MetricId::stroke_speed,
    MetricId::symbol_speed,
};

enum class MetricFamily { structure, technique, precision };

inline constexpr std::string_view to_string(MetricId id) {
  constexpr std::array<std::string_view, kMetricCount> names = {
      "stroke_match",  "stroke_valid",     "stroke_exist",  "stroke_order",
      "stroke_direction", "stroke_edit",   "stroke_length", "stroke_closeness",
      "stroke_speed",  "symbol_speed",
  };
  return names[static_cast<std::size_t>(id)];
}

inline std::optional<MetricId> metric_from_string(std::string_view name) {
  for (auto id : kAllMetrics)
    if (to_string(id) == name) return id;
  return std::nullopt;
}

inline constexpr MetricFamily family_of(MetricId id) {
  switch (id) {
    case MetricId::stroke_match:
    case MetricId::stroke_valid:
    case MetricId::stroke_exist: return MetricFamily::structure;
    case MetricId::stroke_order:
    case MetricId::stroke_direction: return MetricFamily::technique;
    default: return MetricFamily::precision;
  }
}

inline constexpr std::size_t index_of(MetricId id) { return static_cast<std::size_t>(id); }

// Higher is better: 3 stars at >= three_star_min, 2 at >= two_star_min.
struct RatioCutoffs {
  double three_star_min = 0.9;
  double two_star_min = 0.6;
  friend bool operator==(const RatioCutoffs&, const RatioCutoffs&) = default;
};

// Lower is better (normalized-frame pixels).
struct DistanceCutoffs {
  double three_star_max = 12.0;
  double two_star_max = 30.0;
  friend bool operator==(const DistanceCutoffs&, const DistanceCutoffs&) = default;
};

// Closed bands around 1.0 for input/model ratios.
struct BandCutoffs {
  double three_star_lo = 0.75;
  double three_star_hi = 1.33;
  double two_star_lo = 0.5;
  double two_star_hi = 2.0;
  friend bool operator==(const BandCutoffs&, const BandCutoffs&) = default;
};

struct CountCutoffs {
  double three_star_max = 0;
  double two_star_max = 2;
  friend bool operator==(const CountCutoffs&, const CountCutoffs&) = default;
};

using Cutoffs = std::variant<RatioCutoffs, DistanceCutoffs, BandCutoffs, CountCutoffs>;

inline Cutoffs default_cutoffs(MetricId id) {
  switch (id) {
    case MetricId::stroke_edit: return CountCutoffs{};
    case MetricId::stroke_closeness: return DistanceCutoffs{};
    case MetricId::stroke_length:
    case MetricId::stroke_speed:
    case MetricId::symbol_speed: return BandCutoffs{};
    default: return RatioCutoffs{};
  }
}

struct ThresholdConfig {
  std::size_t resample_n = 64;
  double scale_size = 250.0;
  double match_threshold = 60.0;  // max Hausdorff distance for an accepted pair
  std::array<Cutoffs, kMetricCount> cutoffs = [] {
    std::array<Cutoffs, kMetricCount> c{};
    for (auto id : kAllMetrics) c[index_of(id)] = default_cutoffs(id);
    return c;
  }();

  const Cutoffs& cutoffs_for(MetricId id) const { return cutoffs[index_of(id)]; }
  Cutoffs& cutoffs_for(MetricId id) { return cutoffs[index_of(id)]; }

  friend bool operator==(const ThresholdConfig&, const ThresholdConfig&) = default;
};

// Three-star region must sit inside the two-star region.
inline void validate(const ThresholdConfig& cfg) {
  if (cfg.resample_n < 2) throw Error(ErrorKind::config, "must be at least 2", "resampleCount");
  if (!(cfg.scale_size > 0)) throw Error(ErrorKind::config, "must be positive", "scaleSize");
  if (!(cfg.match_threshold >= 0)) throw Error(ErrorKind::config, "must be non-negative", "matchThreshold");
  for (auto id : kAllMetrics) {
    const std::string path = "metrics." + std::string(to_string(id));
    const auto& c = cfg.cutoffs_for(id);
    if (c.index() != default_cutoffs(id).index())
      throw Error(ErrorKind::config, "wrong cutoff kind for metric", path);
    bool ordered = std::visit(
        [](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, RatioCutoffs>)
            return v.three_star_min >= v.two_star_min;
          else if constexpr (std::is_same_v<T, BandCutoffs>)
            return v.two_star_lo <= v.three_star_lo && v.three_star_lo <= v.three_star_hi &&
                   v.three_star_hi <= v.two_star_hi;
          else
            return v.three_star_max <= v.two_star_max;
        },
        c);
    if (!ordered) throw Error(ErrorKind::config, "three-star region must lie inside two-star region", path);
  }
}

inline nlohmann::ordered_json cutoffs_to_json(const Cutoffs& c) {
  nlohmann::ordered_json j;
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RatioCutoffs>) {
          j["threeStarMin"] = v.three_star_min;
          j["twoStarMin"] = v.two_star_min;
        } else if constexpr (std::is_same_v<T, DistanceCutoffs>) {
          j["threeStarMax"] = v.three_star_max;
          j["twoStarMax"] = v.two_star_max;
        } else if constexpr (std::is_same_v<T, BandCutoffs>) {
          j["threeStar"] = {v.three_star_lo, v.three_star_hi};
          j["twoStar"] = {v.two_star_lo, v.two_star_hi};
        } else {
          j["threeStarMax"] = v.three_star_max;
          j["twoStarMax"] = v.two_star_max;
        }
      },
      c);
  return j;
}

inline nlohmann::ordered_json thresholds_to_json(const ThresholdConfig& cfg) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["resampleCount"] = cfg.resample_n;
  j["scaleSize"] = cfg.scale_size;
  j["matchThreshold"] = cfg.match_threshold;
  auto& metrics = j["metrics"];
  metrics = nlohmann::ordered_json::object();
  for (auto id : kAllMetrics) metrics[std::string(to_string(id))] = cutoffs_to_json(cfg.cutoffs_for(id));
  return j;
}

namespace detail {

inline double cfg_number(const nlohmann::json& obj, const char* key, double fallback,
                         const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw Error(ErrorKind::config, "expected number", path + "." + key);
  return it->get<double>();
}

inline std::pair<double, double> cfg_range(const nlohmann::json& obj, const char* key,
                                           std::pair<double, double> fallback,
                                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    throw Error(ErrorKind::config, "expected [lo, hi]", path + "." + key);
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

}  // namespace detail

// Fields absent from `j` keep the values in `base`.
inline ThresholdConfig thresholds_from_json(const nlohmann::json& j, ThresholdConfig base = {}) {
  using detail::cfg_number;
  if (!j.is_object()) throw Error(ErrorKind::config, "expected object", "$");
  if (auto it = j.find("resampleCount"); it != j.end()) {
    if (!it->is_number_unsigned()) throw Error(ErrorKind::config, "expected positive integer", "resampleCount");
    base.resample_n = it->get<std::size_t>();
  }
  base.scale_size = cfg_number(j, "scaleSize", base.scale_size, "");
  base.match_threshold = cfg_number(j, "matchThreshold", base.match_threshold, "");
  if (auto it = j.find("metrics"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorKind::config, "expected object", "metrics");
    for (const auto& [name, value] : it->items()) {
      const std::string path = "metrics." + name;
      auto id = metric_from_string(name);
      if (!id) throw Error(ErrorKind::config, "unknown metric id", path);
      if (!value.is_object()) throw Error(ErrorKind::config, "expected object", path);
      std::visit(
          [&](auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RatioCutoffs>) {
              v.three_star_min = cfg_number(value, "threeStarMin", v.three_star_min, path);
              v.two_star_min = cfg_number(value, "twoStarMin", v.two_star_min, path);
            } else if constexpr (std::is_same_v<T, BandCutoffs>) {
              std::tie(v.three_star_lo, v.three_star_hi) =
                  detail::cfg_range(value, "threeStar", {v.three_star_lo, v.three_star_hi}, path);
              std::tie(v.two_star_lo, v.two_star_hi) =
                  detail::cfg_range(value, "twoStar", {v.two_star_lo, v.two_star_hi}, path);
            } else {
              v.three_star_max = cfg_number(value, "threeStarMax", v.three_star_max, path);
              v.two_star_max = cfg_number(value, "twoStarMax", v.two_star_max, path);
            }
          },
          base.cutoffs_for(*id));
    }
  }
  validate(base);
  return base;
}

inline ThresholdConfig load_thresholds(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open thresholds file", path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("malformed JSON: ") + e.what(), path);
  }
  return thresholds_from_json(j);
}

}  // namespace kwb
