#pragma once

// Resampling, scaling and translation into the shared comparison frame.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kwb/error.hpp"
#include "kwb/ink.hpp"

namespace kwb {

inline constexpr std::size_t kDefaultResampleCount = 64;
inline constexpr double kDefaultScaleSize = 250.0;

// Maps resampled source coordinates into a normalized frame:
//   x' = x * scale - shift_x,  y' = y * scale - shift_y
// The two-step form mirrors scale-then-translate so applying a stored
// transform reproduces normalize() bit for bit.
struct FrameTransform {
  double scale = 1.0;
  double shift_x = 0.0;
  double shift_y = 0.0;

  Point apply(const Point& p) const noexcept { return {p.x * scale - shift_x, p.y * scale - shift_y, p.t}; }

  std::vector<Stroke> apply(std::span<const Stroke> strokes) const {
    std::vector<Stroke> out;
    out.reserve(strokes.size());
    for (const auto& s : strokes) {
      Stroke mapped;
      mapped.points.reserve(s.points.size());
      for (const auto& p : s.points) mapped.points.push_back(apply(p));
      out.push_back(std::move(mapped));
    }
    return out;
  }

  friend bool operator==(const FrameTransform&, const FrameTransform&) = default;
};

struct NormalizedSketch {
  std::vector<Stroke> strokes;
  std::size_t resample_count = kDefaultResampleCount;
  double size = kDefaultScaleSize;
  FrameTransform transform;
  bool degenerate = false;   // zero extent in both axes, scaling skipped
  std::string source_label;

  friend bool operator==(const NormalizedSketch&, const NormalizedSketch&) = default;
};

namespace detail {

struct PathPos {
  std::size_t seg = 0;  // segment from points[seg] to points[seg + 1]
  double u = 0.0;       // parameter along that segment in [0, 1]
};

inline Point at(const std::vector<Point>& pts, PathPos pos) {
  const auto& a = pts[pos.seg];
  const auto& b = pts[pos.seg + 1];
  return {a.x + pos.u * (b.x - a.x), a.y + pos.u * (b.y - a.y), 0};
}

// Larger root of |a + u (b - a) - q|^2 = d^2 for a start point inside the circle.
inline double exit_parameter(const Point& a, const Point& b, const Point& q, double d) {
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double fx = a.x - q.x, fy = a.y - q.y;
  const double A = ex * ex + ey * ey;
  const double B = 2.0 * (fx * ex + fy * ey);
  const double C = fx * fx + fy * fy - d * d;
  const double disc = std::max(0.0, B * B - 4.0 * A * C);
  const double s = std::sqrt(disc);
  double u = B > 0.0 ? (2.0 * C) / (-B - s) : (-B + s) / (2.0 * A);
  if (!std::isfinite(u)) u = 1.0;
  return std::clamp(u, 0.0, 1.0);
}

enum class WalkEnd {
  exact,      // the last step lands on the endpoint
  too_short,  // the path ran out first: chord too long
  too_long,   // all steps fit before the endpoint: chord too short
};

struct Walk {
  WalkEnd end = WalkEnd::too_short;
  std::vector<PathPos> positions;  // one per step; the last is the endpoint when exact
};

// Places `steps` points along the polyline, each at Euclidean distance
// `chord` from the previous one (first exit from the circle). The distance
// from a fixed centre is convex along a segment, so a segment holds the
// first exit exactly when its far end is outside the circle.
inline Walk chord_walk(const std::vector<Point>& pts, double chord, std::size_t steps) {
  constexpr double kEndTolerance = 1e-9;
  Walk w;
  w.positions.reserve(steps);
  PathPos pos{0, 0.0};
  Point q = pts.front();
  const std::size_t segs = pts.size() - 1;
  const auto& last = pts.back();
  for (std::size_t k = 0; k < steps; ++k) {
    const bool final_step = k + 1 == steps;
    bool found = false;
    for (std::size_t s = pos.seg; s < segs; ++s) {
      const auto& a = pts[s];
      const auto& b = pts[s + 1];
      if (a.x == b.x && a.y == b.y) continue;
      if (std::hypot(b.x - q.x, b.y - q.y) >= chord) {
        pos = {s, exit_parameter(a, b, q, chord)};
        q = at(pts, pos);
        found = true;
        break;
      }
    }
    if (!found) {
      if (final_step && std::hypot(last.x - q.x, last.y - q.y) >= chord * (1.0 - kEndTolerance)) {
        w.positions.push_back({segs - 1, 1.0});
        w.end = WalkEnd::exact;
      } else {
        w.end = WalkEnd::too_short;
      }
      return w;
    }
    w.positions.push_back(pos);
    if (final_step) {
      const bool on_end = std::hypot(last.x - q.x, last.y - q.y) <= chord * kEndTolerance;
      w.end = on_end ? WalkEnd::exact : WalkEnd::too_long;
      if (on_end) w.positions.back() = {segs - 1, 1.0};
    }
  }
  return w;
}

// Bisects between a chord that is too short and one that is too long.
inline Walk bisect_chord(const std::vector<Point>& pts, double lo, double hi, std::size_t steps) {
  Walk best = chord_walk(pts, lo, steps);
  for (int iter = 0; iter < 200 && hi - lo > hi * 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    auto w = chord_walk(pts, mid, steps);
    if (w.end == WalkEnd::exact) return w;
    if (w.end == WalkEnd::too_long) {
      lo = mid;
      best = std::move(w);
    } else {
      hi = mid;
    }
  }
  return best;
}

// Chord that no step can reach: longer than the bounding-box diagonal.
inline double unreachable_chord(const std::vector<Point>& pts) {
  double lx = pts[0].x, hx = pts[0].x, ly = pts[0].y, hy = pts[0].y;
  for (const auto& p : pts) {
    lx = std::min(lx, p.x);
    hx = std::max(hx, p.x);
    ly = std::min(ly, p.y);
    hy = std::max(hy, p.y);
  }
  return 2.0 * std::hypot(hx - lx, hy - ly);
}

// Finds a chord whose walk ends exactly on the endpoint. Smooth strokes
// are settled by the first bisection. On self-overlapping paths the walk
// can jump past the endpoint as the chord grows, so a scan over the whole
// chord range looks for another bracket that closes exactly; the longest
// exact chord wins. Without one the closest walk is used.
inline Walk solve_chord(const std::vector<Point>& pts, double length, std::size_t steps) {
  constexpr int kScan = 256;
  const double guess = length / static_cast<double>(steps);
  auto first = chord_walk(pts, guess, steps);
  if (first.end == WalkEnd::exact) return first;
  const double top = unreachable_chord(pts);
  auto w = first.end == WalkEnd::too_long ? bisect_chord(pts, guess, top, steps) : bisect_chord(pts, 0.0, guess, steps);
  if (w.end == WalkEnd::exact) return w;

  std::optional<Walk> exact;
  WalkEnd prev = WalkEnd::too_long;
  double prev_c = 0.0;
  for (int i = kScan; i >= 1 && !exact; --i) {
    // Scan downwards so the first exact bracket is the longest chord.
    const double c = top * static_cast<double>(i) / kScan;
    const auto here = chord_walk(pts, c, steps).end;
    if (here == WalkEnd::exact) exact = chord_walk(pts, c, steps);
    else if (i < kScan && here == WalkEnd::too_long && prev == WalkEnd::too_short) {
      auto b = bisect_chord(pts, c, prev_c, steps);
      if (b.end == WalkEnd::exact) exact = std::move(b);
    }
    prev = here;
    prev_c = c;
  }
  return exact ? std::move(*exact) : w;
}

inline Millis interpolate_time(const std::vector<Point>& pts, PathPos pos) {
  const double ta = static_cast<double>(pts[pos.seg].t);
  const double tb = static_cast<double>(pts[pos.seg + 1].t);
  return static_cast<Millis>(std::llround(ta + pos.u * (tb - ta)));
}

}  // namespace detail

// Resamples a stroke to `n` points lying on the original polyline, in order,
// with equal Euclidean spacing between consecutive points. Endpoints are kept
// exactly; timestamps are interpolated along the source segments. A stroke
// with zero path length collapses to `n` copies of its position.
inline Stroke resample(const Stroke& stroke, std::size_t n = kDefaultResampleCount) {
  if (n < 2) throw Error(ErrorKind::argument, "resample count must be at least 2");
  if (stroke.points.empty()) throw Error(ErrorKind::argument, "cannot resample an empty stroke");

  const auto& pts = stroke.points;
  const double length = stroke_path_length(stroke);
  Stroke out;
  out.points.reserve(n);

  if (!(length > 0.0)) {
    const auto& p = pts.front();
    const double t0 = static_cast<double>(pts.front().t);
    const double t1 = static_cast<double>(pts.back().t);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n - 1);
      out.points.push_back({p.x, p.y, static_cast<Millis>(std::llround(t0 + f * (t1 - t0)))});
    }
    out.points.back().t = pts.back().t;
    return out;
  }

  const std::size_t steps = n - 1;
  const auto walk = detail::solve_chord(pts, length, steps);

  out.points.push_back(pts.front());
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    auto p = detail::at(pts, walk.positions[k]);
    p.t = detail::interpolate_time(pts, walk.positions[k]);
    out.points.push_back(p);
  }
  out.points.push_back(pts.back());
  return out;
}

struct ScaleResult {
  Sketch sketch;
  double factor = 1.0;
  bool degenerate = false;
};

inline std::vector<Stroke> scale_strokes(std::span<const Stroke> strokes, double factor) {
  std::vector<Stroke> out(strokes.begin(), strokes.end());
  for (auto& s : out)
    for (auto& p : s.points) {
      p.x *= factor;
      p.y *= factor;
    }
  return out;
}

// Uniform scale so the larger bounding-box side equals `size`.
inline ScaleResult scale_to_square(const Sketch& sketch, double size = kDefaultScaleSize) {
  const auto box = bounding_box(sketch);
  ScaleResult result{sketch, 1.0, false};
  if (!(box.max_side() > 0.0)) {
    result.degenerate = true;
    return result;
  }
  result.factor = size / box.max_side();
  result.sketch.strokes = scale_strokes(sketch.strokes, result.factor);
  return result;
}

inline Sketch translate_to_origin(const Sketch& sketch) {
  const auto box = bounding_box(sketch);
  Sketch out = sketch;
  for (auto& s : out.strokes)
    for (auto& p : s.points) {
      p.x -= box.min_x;
      p.y -= box.min_y;
    }
  return out;
}

// resample each stroke -> scale the whole sketch -> translate the whole sketch
inline NormalizedSketch normalize(const Sketch& sketch, std::size_t n = kDefaultResampleCount,
                                  double size = kDefaultScaleSize) {
  if (sketch.strokes.empty()) throw Error(ErrorKind::empty_sketch, "empty sketch", "strokes");
  if (!(size > 0.0)) throw Error(ErrorKind::argument, "scale size must be positive");

  Sketch resampled;
  resampled.metadata = sketch.metadata;
  resampled.strokes.reserve(sketch.strokes.size());
  for (const auto& s : sketch.strokes) resampled.strokes.push_back(resample(s, n));

  auto scaled = scale_to_square(resampled, size);
  const auto box = bounding_box(scaled.sketch);
  auto translated = translate_to_origin(scaled.sketch);

  NormalizedSketch out;
  out.strokes = std::move(translated.strokes);
  out.resample_count = n;
  out.size = size;
  out.transform = {scaled.factor, box.min_x, box.min_y};
  out.degenerate = scaled.degenerate;
  out.source_label = sketch.metadata.label;
  return out;
}

}  // namespace kwb
