#pragma once

// Digital ink data model: timestamped points grouped into strokes and
// sketches, plus the canonical JSON encoding used on disk and on the wire.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kwb/error.hpp"

namespace kwb {

using Millis = std::int64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
  Millis t = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Stroke {
  std::vector<Point> points;

  bool empty() const noexcept { return points.empty(); }
  std::size_t size() const noexcept { return points.size(); }
  const Point& front() const { return points.front(); }
  const Point& back() const { return points.back(); }

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

struct Metadata {
  std::string label;
  double canvas_width = 0.0;
  double canvas_height = 0.0;

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

enum class EditKind { undo, clear };

struct EditEvent {
  EditKind kind = EditKind::undo;
  Millis t = 0;

  friend bool operator==(const EditEvent&, const EditEvent&) = default;
};

struct SessionEvents {
  std::vector<EditEvent> edits;
  Millis started_at = 0;
  Millis submitted_at = 0;

  friend bool operator==(const SessionEvents&, const SessionEvents&) = default;
};

struct Sketch {
  std::vector<Stroke> strokes;
  Metadata metadata;
  std::optional<SessionEvents> events;

  friend bool operator==(const Sketch&, const Sketch&) = default;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double width = 0.0;
  double height = 0.0;

  double max_x() const noexcept { return min_x + width; }
  double max_y() const noexcept { return min_y + height; }
  double max_side() const noexcept { return std::max(width, height); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// ---------------------------------------------------------------------------
// Geometry and timing accessors

inline double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double stroke_path_length(const Stroke& stroke) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < stroke.points.size(); ++i)
    total += distance(stroke.points[i - 1], stroke.points[i]);
  return total;
}

inline Millis stroke_duration(const Stroke& stroke) noexcept {
  if (stroke.points.empty()) return 0;
  return stroke.points.back().t - stroke.points.front().t;
}

inline Millis sketch_duration(const Sketch& sketch) noexcept {
  if (sketch.strokes.empty()) return 0;
  const auto& first = sketch.strokes.front();
  const auto& last = sketch.strokes.back();
  if (first.empty() || last.empty()) return 0;
  return last.back().t - first.front().t;
}

inline BoundingBox bounding_box(std::span<const Stroke> strokes) {
  bool seen = false;
  double lo_x = 0, lo_y = 0, hi_x = 0, hi_y = 0;
  for (const auto& stroke : strokes) {
    for (const auto& p : stroke.points) {
      if (!seen) {
        lo_x = hi_x = p.x;
        lo_y = hi_y = p.y;
        seen = true;
        continue;
      }
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
  }
  if (!seen) throw Error(ErrorKind::argument, "bounding box of an empty point set");
  return {lo_x, lo_y, hi_x - lo_x, hi_y - lo_y};
}

inline BoundingBox bounding_box(const Stroke& stroke) {
  return bounding_box(std::span<const Stroke>(&stroke, 1));
}

inline BoundingBox bounding_box(const Sketch& sketch) {
  return bounding_box(std::span<const Stroke>(sketch.strokes));
}

inline Stroke reversed(const Stroke& stroke) {
  Stroke out{{stroke.points.rbegin(), stroke.points.rend()}};
  return out;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate_events(const SessionEvents& ev, const std::string& path = "events") {
  if (ev.started_at < 0) throw Error(ErrorKind::validation, "negative start time", path + ".startedAt");
  if (ev.submitted_at < ev.started_at)
    throw Error(ErrorKind::validation, "submitted before started", path + ".submittedAt");
  for (std::size_t i = 0; i < ev.edits.size(); ++i) {
    const auto t = ev.edits[i].t;
    const auto at = path + ".edits[" + std::to_string(i) + "].t";
    if (t < ev.started_at || t > ev.submitted_at)
      throw Error(ErrorKind::validation, "edit event outside [startedAt, submittedAt]", at);
    if (i > 0 && t < ev.edits[i - 1].t)
      throw Error(ErrorKind::validation, "edit events out of order", at);
  }
}

// Checks every Sketch/Stroke/Point invariant. Empty stroke list is reported
// as ErrorKind::empty_sketch so callers can distinguish it from bad data.
inline void validate(const Sketch& sketch) {
  if (sketch.metadata.label.empty())
    throw Error(ErrorKind::validation, "label must be non-empty", "metadata.label");
  if (!(sketch.metadata.canvas_width > 0) || !std::isfinite(sketch.metadata.canvas_width))
    throw Error(ErrorKind::validation, "canvas width must be positive", "metadata.canvasWidth");
  if (!(sketch.metadata.canvas_height > 0) || !std::isfinite(sketch.metadata.canvas_height))
    throw Error(ErrorKind::validation, "canvas height must be positive", "metadata.canvasHeight");
  if (sketch.strokes.empty()) throw Error(ErrorKind::empty_sketch, "empty sketch", "strokes");

  Millis prev_start = 0;
  for (std::size_t s = 0; s < sketch.strokes.size(); ++s) {
    const auto& pts = sketch.strokes[s].points;
    const auto spath = "strokes[" + std::to_string(s) + "]";
    if (pts.empty()) throw Error(ErrorKind::validation, "stroke has no points", spath + ".points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto ppath = spath + ".points[" + std::to_string(i) + "]";
      if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y))
        throw Error(ErrorKind::validation, "non-finite coordinate", ppath);
      if (pts[i].t < 0) throw Error(ErrorKind::validation, "negative timestamp", ppath + ".t");
      if (i > 0 && pts[i].t < pts[i - 1].t)
        throw Error(ErrorKind::validation, "timestamps must be non-decreasing", ppath + ".t");
    }
    if (s > 0 && pts.front().t < prev_start)
      throw Error(ErrorKind::validation, "strokes must be in writing order", spath + ".points[0].t");
    prev_start = pts.front().t;
  }
  if (sketch.events) validate_events(*sketch.events);
}

// ---------------------------------------------------------------------------
// JSON encoding

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(ErrorKind::parse, "expected object", path);
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorKind::parse, "missing field", path.empty() ? key : path + "." + key);
  return *it;
}

inline std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorKind::parse, "expected number", path);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorKind::parse, "expected finite number", path);
  return d;
}

inline Millis as_integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<Millis>();
  throw Error(ErrorKind::parse, "expected integer", path);
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw Error(ErrorKind::parse, "expected string", path);
  return v.get<std::string>();
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw Error(ErrorKind::parse, "expected array", path);
  return v;
}

}  // namespace detail

inline Sketch sketch_from_json(const nlohmann::json& doc) {
  using namespace detail;
  Sketch sketch;
  const auto& meta = require(doc, "metadata", "");
  sketch.metadata.label = as_string(require(meta, "label", "metadata"), "metadata.label");
  sketch.metadata.canvas_width =
      as_number(require(meta, "canvasWidth", "metadata"), "metadata.canvasWidth");
  sketch.metadata.canvas_height =
      as_number(require(meta, "canvasHeight", "metadata"), "metadata.canvasHeight");

  const auto& strokes = as_array(require(doc, "strokes", ""), "strokes");
  sketch.strokes.reserve(strokes.size());
  for (std::size_t s = 0; s < strokes.size(); ++s) {
    const auto spath = "strokes[" + std::to_string(s) + "]";
    const auto& points = as_array(require(strokes[s], "points", spath), spath + ".points");
    Stroke stroke;
    stroke.points.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto ppath = spath + ".points[" + std::to_string(i) + "]";
      const auto& p = points[i];
      stroke.points.push_back({as_number(require(p, "x", ppath), ppath + ".x"),
                               as_number(require(p, "y", ppath), ppath + ".y"),
                               as_integer(require(p, "t", ppath), ppath + ".t")});
    }
    sketch.strokes.push_back(std::move(stroke));
  }

  if (auto it = doc.find("events"); it != doc.end() && !it->is_null()) {
    SessionEvents ev;
    ev.started_at = as_integer(require(*it, "startedAt", "events"), "events.startedAt");
    ev.submitted_at = as_integer(require(*it, "submittedAt", "events"), "events.submittedAt");
    const auto& edits = as_array(require(*it, "edits", "events"), "events.edits");
    for (std::size_t i = 0; i < edits.size(); ++i) {
      const auto epath = "events.edits[" + std::to_string(i) + "]";
      const auto kind = as_string(require(edits[i], "kind", epath), epath + ".kind");
      EditEvent e;
      if (kind == "undo") e.kind = EditKind::undo;
      else if (kind == "clear") e.kind = EditKind::clear;
      else throw Error(ErrorKind::parse, "expected \"undo\" or \"clear\"", epath + ".kind");
      e.t = as_integer(require(edits[i], "t", epath), epath + ".t");
      ev.edits.push_back(e);
    }
    sketch.events = std::move(ev);
  }
  validate(sketch);
  return sketch;
}

inline Sketch parse_ink(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what(), "$");
  }
  return sketch_from_json(doc);
}

inline nlohmann::ordered_json strokes_to_json(std::span<const Stroke> strokes) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& stroke : strokes) {
    auto pts = nlohmann::ordered_json::array();
    for (const auto& p : stroke.points) {
      nlohmann::ordered_json jp;
      jp["x"] = p.x;
      jp["y"] = p.y;
      jp["t"] = p.t;
      pts.push_back(std::move(jp));
    }
    nlohmann::ordered_json js;
    js["points"] = std::move(pts);
    arr.push_back(std::move(js));
  }
  return arr;
}

// Canonical key order: metadata, strokes, events. Coordinates are always
// emitted as JSON doubles in shortest round-trip form.
inline nlohmann::ordered_json sketch_to_json(const Sketch& sketch) {
  nlohmann::ordered_json doc;
  doc["metadata"]["label"] = sketch.metadata.label;
  doc["metadata"]["canvasWidth"] = sketch.metadata.canvas_width;
  doc["metadata"]["canvasHeight"] = sketch.metadata.canvas_height;
  doc["strokes"] = strokes_to_json(sketch.strokes);
  if (sketch.events) {
    auto& ev = doc["events"];
    ev["startedAt"] = sketch.events->started_at;
    ev["submittedAt"] = sketch.events->submitted_at;
    ev["edits"] = nlohmann::ordered_json::array();
    for (const auto& e : sketch.events->edits) {
      nlohmann::ordered_json je;
      je["kind"] = e.kind == EditKind::undo ? "undo" : "clear";
      je["t"] = e.t;
      ev["edits"].push_back(std::move(je));
    }
  }
  return doc;
}

inline std::string serialize_ink(const Sketch& sketch) { return sketch_to_json(sketch).dump(); }

}  // namespace kwb
