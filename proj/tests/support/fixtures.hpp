#pragma once

// Shared test helpers: independent oracles, random generators, the sample
// store and the mutation constructions.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "kwb/kwb.hpp"

#ifndef KWB_SAMPLE_DIR
#define KWB_SAMPLE_DIR "data/sample"
#endif

namespace kwb::testing {

inline std::filesystem::path sample_dir() { return KWB_SAMPLE_DIR; }

// ---------------------------------------------------------------------------
// Oracles. These deliberately avoid the engine's own helpers.

inline double brute_hausdorff(const Stroke& a, const Stroke& b) {
  const auto directed = [](const Stroke& p, const Stroke& q) {
    double worst = 0.0;
    for (const auto& u : p.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& v : q.points) {
        const double dx = u.x - v.x, dy = u.y - v.y;
        best = std::min(best, std::sqrt(dx * dx + dy * dy));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Minimum total cost over every injective pairing of the smaller side.
// Totals are summed in row order so equal assignments compare exactly.
inline double brute_min_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  const std::size_t k = std::min(rows, cols);
  if (k == 0) return 0.0;
  const bool by_rows = rows >= cols;  // permute the larger side
  std::vector<std::size_t> perm(by_rows ? rows : cols);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<double> by_row(rows, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (by_rows)
        by_row[perm[i]] = cost[perm[i]][i];
      else
        by_row[i] = cost[i][perm[i]];
    }
    double total = 0.0;
    for (double c : by_row) total += c;
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double oracle_path_length(const std::vector<std::pair<double, double>>& pts) {
  long double total = 0.0L;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const long double dx = pts[i].first - pts[i - 1].first;
    const long double dy = pts[i].second - pts[i - 1].second;
    total += std::sqrt(dx * dx + dy * dy);
  }
  return static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Generators

inline Stroke random_stroke(std::mt19937& rng, std::size_t min_points, std::size_t max_points, double extent,
                            Millis t0 = 0) {
  std::uniform_int_distribution<std::size_t> count(min_points, max_points);
  std::uniform_real_distribution<double> coord(0.0, extent);
  std::uniform_int_distribution<int> dt(1, 20);
  Stroke s;
  const auto n = count(rng);
  Millis t = t0;
  for (std::size_t i = 0; i < n; ++i) {
    s.points.push_back({coord(rng), coord(rng), t});
    t += dt(rng);
  }
  return s;
}

inline Sketch random_sketch(std::mt19937& rng, std::size_t max_strokes = 4, std::size_t max_points = 20,
                            double extent = 400.0) {
  std::uniform_int_distribution<std::size_t> strokes(1, max_strokes);
  Sketch s;
  s.metadata = {"一", extent, extent};
  Millis t = 0;
  const auto n = strokes(rng);
  for (std::size_t i = 0; i < n; ++i) {
    s.strokes.push_back(random_stroke(rng, 2, max_points, extent, t));
    t = s.strokes.back().points.back().t + 50;
  }
  return s;
}

// Pen-like stroke: a random walk whose heading turns by at most
// `max_turn` radians per vertex, as handwriting does. Unconstrained
// zig-zags can fold back so that no equal-chord resampling reaches the
// endpoint; those are covered by the uniform generator above.
inline Stroke pen_stroke(std::mt19937& rng, std::size_t min_points, std::size_t max_points, double extent,
                         Millis t0 = 0, double max_turn = 1.0471975511965976) {
  std::uniform_int_distribution<std::size_t> count(min_points, max_points);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dt(1, 20);
  Stroke s;
  const auto n = count(rng);
  double x = unit(rng) * extent, y = unit(rng) * extent, heading = unit(rng) * 6.283185307179586;
  Millis t = t0;
  for (std::size_t i = 0; i < n; ++i) {
    s.points.push_back({x, y, t});
    const double step = 5.0 + unit(rng) * extent / 8.0;
    heading += (2.0 * unit(rng) - 1.0) * max_turn;
    x += step * std::cos(heading);
    y += step * std::sin(heading);
    t += dt(rng);
  }
  return s;
}

inline Sketch pen_sketch(std::mt19937& rng, std::size_t max_strokes = 4, std::size_t max_points = 20,
                         double extent = 400.0) {
  std::uniform_int_distribution<std::size_t> strokes(1, max_strokes);
  Sketch s;
  s.metadata = {"一", extent, extent};
  Millis t = 0;
  const auto n = strokes(rng);
  for (std::size_t i = 0; i < n; ++i) {
    s.strokes.push_back(pen_stroke(rng, 2, max_points, extent, t));
    t = s.strokes.back().points.back().t + 50;
  }
  return s;
}

inline Stroke line(double x0, double y0, double x1, double y1, std::size_t points = 2, Millis t0 = 0,
                   Millis dt = 10) {
  Stroke s;
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points > 1 ? static_cast<double>(i) / static_cast<double>(points - 1) : 0.0;
    s.points.push_back({x0 + f * (x1 - x0), y0 + f * (y1 - y0), t0 + static_cast<Millis>(i) * dt});
  }
  return s;
}

inline Sketch sketch_of(std::vector<Stroke> strokes, std::string label = "一", double canvas = 400.0) {
  Sketch s;
  s.metadata = {std::move(label), canvas, canvas};
  s.strokes = std::move(strokes);
  return s;
}

// ---------------------------------------------------------------------------
// Sample data

inline std::vector<Sketch> sample_raw_inks() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(sample_dir() / "raw"))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Sketch> out;
  for (const auto& f : files) out.push_back(parse_ink(read_text_file(f)));
  return out;
}

inline Catalog sample_catalog() {
  return catalog_from_json(nlohmann::json::parse(read_text_file(sample_dir() / "catalog.json")));
}

inline const TemplateStore& sample_store() {
  static const TemplateStore store = TemplateStore::build(sample_raw_inks(), sample_catalog());
  return store;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kwb_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Mutations of an expert sketch. Each keeps the symbol's time span so that
// only the targeted metric family can move.

// Removes an interior stroke; needs at least three strokes.
inline Sketch delete_interior_stroke(Sketch s) {
  s.strokes.erase(s.strokes.begin() + 1);
  return s;
}

// A short stroke one bounding-box side beyond the character, written
// during the pause after the first stroke.
inline Sketch add_distant_stroke(Sketch s) {
  const auto box = bounding_box(s);
  const double side = std::max(box.max_side(), 1.0);
  const double x = box.max_x() + side;
  const double y = box.max_y() + side;
  const Millis start = s.strokes[0].points.back().t;
  const Millis end = s.strokes.size() > 1 ? s.strokes[1].points.front().t : start;
  const Millis mid = start + (end - start) / 2;
  Stroke extra;
  extra.points = {{x, y, start + (mid - start) / 2}, {x + side / 4, y, mid}};
  s.strokes.insert(s.strokes.begin() + 1, std::move(extra));
  return s;
}

// Same geometry written from the other end; timestamps stay ascending.
inline Sketch reverse_stroke(Sketch s, std::size_t k) {
  auto& pts = s.strokes[k].points;
  std::vector<Millis> times;
  for (const auto& p : pts) times.push_back(p.t);
  std::reverse(pts.begin(), pts.end());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].t = times[i];
  return s;
}

// Writes stroke k+1 before stroke k. Every stroke keeps its own duration
// and the pauses between strokes keep their original lengths.
inline Sketch swap_adjacent(Sketch s, std::size_t k) {
  const auto n = s.strokes.size();
  std::vector<Millis> gaps;
  for (std::size_t i = 1; i < n; ++i) gaps.push_back(s.strokes[i].points.front().t - s.strokes[i - 1].points.back().t);
  std::swap(s.strokes[k], s.strokes[k + 1]);
  Millis cursor = s.strokes[0].points.front().t;
  if (k == 0) cursor = std::min(s.strokes[0].points.front().t, s.strokes[1].points.front().t);
  for (std::size_t i = 0; i < n; ++i) {
    auto& pts = s.strokes[i].points;
    const Millis shift = cursor - pts.front().t;
    for (auto& p : pts) p.t += shift;
    if (i + 1 < n) cursor = pts.back().t + gaps[i];
  }
  return s;
}

}  // namespace kwb::testing
