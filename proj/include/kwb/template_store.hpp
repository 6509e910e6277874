#pragma once

// Expert model templates and the lesson catalog: preprocessing into an
// on-disk store, loading it back, and read-only lookups.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "kwb/error.hpp"
#include "kwb/ink.hpp"
#include "kwb/normalize.hpp"

namespace kwb {

struct Template {
  std::string label;
  NormalizedSketch normalized;
  Sketch raw;
  std::size_t stroke_count = 0;
  std::vector<double> per_stroke_lengths;   // normalized frame
  std::vector<Millis> per_stroke_durations; // raw timing
  Millis total_duration = 0;
};

inline Template make_template(Sketch raw, std::size_t n = kDefaultResampleCount,
                              double size = kDefaultScaleSize) {
  validate(raw);
  Template t;
  t.label = raw.metadata.label;
  t.normalized = normalize(raw, n, size);
  t.stroke_count = raw.strokes.size();
  for (const auto& s : t.normalized.strokes) t.per_stroke_lengths.push_back(stroke_path_length(s));
  for (const auto& s : raw.strokes) t.per_stroke_durations.push_back(stroke_duration(s));
  t.total_duration = sketch_duration(raw);
  t.raw = std::move(raw);
  return t;
}

struct VocabularyEntry {
  std::string word;
  std::string pronunciation;
  std::string translation;
  bool highlighted = false;
};

struct CharacterInfo {
  std::string label;
  std::vector<std::string> pronunciations;
  std::vector<std::string> translations;
  std::vector<VocabularyEntry> vocabulary;
};

struct Lesson {
  std::string id;
  std::string title;
  std::vector<std::string> character_labels;
};

struct Catalog {
  std::vector<Lesson> lessons;
  std::map<std::string, std::vector<CharacterInfo>> characters;  // by lesson id, in lesson order
};

// ---------------------------------------------------------------------------
// Catalog JSON

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& obj, const char* key,
                                            const std::string& path) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw Error(ErrorKind::parse, "expected array", path + "." + key);
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string())
      throw Error(ErrorKind::parse, "expected string", path + "." + key + "[" + std::to_string(i) + "]");
    out.push_back((*it)[i].get<std::string>());
  }
  return out;
}

}  // namespace detail

inline Catalog catalog_from_json(const nlohmann::json& doc) {
  using namespace detail;
  Catalog cat;
  const auto& lessons = as_array(require(doc, "lessons", ""), "lessons");
  std::set<std::string> ids;
  for (std::size_t l = 0; l < lessons.size(); ++l) {
    const auto lpath = "lessons[" + std::to_string(l) + "]";
    Lesson lesson;
    lesson.id = as_string(require(lessons[l], "id", lpath), lpath + ".id");
    lesson.title = as_string(require(lessons[l], "title", lpath), lpath + ".title");
    if (!ids.insert(lesson.id).second) throw Error(ErrorKind::validation, "duplicate lesson id " + lesson.id, lpath + ".id");
    const auto& chars = as_array(require(lessons[l], "characters", lpath), lpath + ".characters");
    std::vector<CharacterInfo> infos;
    std::vector<std::string> dups;
    for (std::size_t c = 0; c < chars.size(); ++c) {
      const auto cpath = lpath + ".characters[" + std::to_string(c) + "]";
      CharacterInfo info;
      info.label = as_string(require(chars[c], "label", cpath), cpath + ".label");
      if (info.label.empty()) throw Error(ErrorKind::validation, "empty label", cpath + ".label");
      info.pronunciations = string_list(chars[c], "pronunciations", cpath);
      info.translations = string_list(chars[c], "translations", cpath);
      if (auto it = chars[c].find("vocabulary"); it != chars[c].end()) {
        const auto& vocab = as_array(*it, cpath + ".vocabulary");
        for (std::size_t v = 0; v < vocab.size(); ++v) {
          const auto vpath = cpath + ".vocabulary[" + std::to_string(v) + "]";
          VocabularyEntry e;
          e.word = as_string(require(vocab[v], "word", vpath), vpath + ".word");
          e.pronunciation = as_string(require(vocab[v], "pronunciation", vpath), vpath + ".pronunciation");
          e.translation = as_string(require(vocab[v], "translation", vpath), vpath + ".translation");
          if (auto h = vocab[v].find("highlighted"); h != vocab[v].end()) {
            if (!h->is_boolean()) throw Error(ErrorKind::parse, "expected boolean", vpath + ".highlighted");
            e.highlighted = h->get<bool>();
          }
          info.vocabulary.push_back(std::move(e));
        }
      }
      if (std::find(lesson.character_labels.begin(), lesson.character_labels.end(), info.label) !=
          lesson.character_labels.end())
        dups.push_back(info.label);
      lesson.character_labels.push_back(info.label);
      infos.push_back(std::move(info));
    }
    if (!dups.empty()) {
      std::string list;
      for (const auto& d : dups) list += (list.empty() ? "" : ", ") + d;
      throw Error(ErrorKind::validation, "duplicate labels in lesson: " + list, lpath + ".characters");
    }
    cat.characters[lesson.id] = std::move(infos);
    cat.lessons.push_back(std::move(lesson));
  }
  return cat;
}

inline nlohmann::ordered_json character_info_to_json(const CharacterInfo& info) {
  nlohmann::ordered_json j;
  j["label"] = info.label;
  j["pronunciations"] = info.pronunciations;
  j["translations"] = info.translations;
  j["vocabulary"] = nlohmann::ordered_json::array();
  for (const auto& v : info.vocabulary) {
    nlohmann::ordered_json jv;
    jv["word"] = v.word;
    jv["pronunciation"] = v.pronunciation;
    jv["translation"] = v.translation;
    jv["highlighted"] = v.highlighted;
    j["vocabulary"].push_back(std::move(jv));
  }
  return j;
}

inline nlohmann::ordered_json catalog_to_json(const Catalog& cat) {
  nlohmann::ordered_json j;
  j["lessons"] = nlohmann::ordered_json::array();
  for (const auto& lesson : cat.lessons) {
    nlohmann::ordered_json jl;
    jl["id"] = lesson.id;
    jl["title"] = lesson.title;
    jl["characters"] = nlohmann::ordered_json::array();
    for (const auto& info : cat.characters.at(lesson.id)) jl["characters"].push_back(character_info_to_json(info));
    j["lessons"].push_back(std::move(jl));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Template JSON

inline nlohmann::ordered_json template_to_json(const Template& t) {
  nlohmann::ordered_json j;
  j["label"] = t.label;
  j["strokeCount"] = t.stroke_count;
  j["perStrokeLengths"] = t.per_stroke_lengths;
  j["perStrokeDurations"] = t.per_stroke_durations;
  j["totalDuration"] = t.total_duration;
  auto& norm = j["normalized"];
  norm["resampleCount"] = t.normalized.resample_count;
  norm["scaleSize"] = t.normalized.size;
  norm["transform"]["scale"] = t.normalized.transform.scale;
  norm["transform"]["shiftX"] = t.normalized.transform.shift_x;
  norm["transform"]["shiftY"] = t.normalized.transform.shift_y;
  norm["degenerate"] = t.normalized.degenerate;
  norm["strokes"] = strokes_to_json(t.normalized.strokes);
  j["raw"] = sketch_to_json(t.raw);
  return j;
}

inline Template template_from_json(const nlohmann::json& j, const std::string& where) {
  using namespace detail;
  try {
    Template t;
    t.label = as_string(require(j, "label", ""), "label");
    t.raw = sketch_from_json(require(j, "raw", ""));
    const auto& norm = require(j, "normalized", "");
    t.normalized.resample_count = static_cast<std::size_t>(
        as_integer(require(norm, "resampleCount", "normalized"), "normalized.resampleCount"));
    t.normalized.size = as_number(require(norm, "scaleSize", "normalized"), "normalized.scaleSize");
    const auto& tr = require(norm, "transform", "normalized");
    t.normalized.transform = {as_number(require(tr, "scale", "normalized.transform"), "normalized.transform.scale"),
                              as_number(require(tr, "shiftX", "normalized.transform"), "normalized.transform.shiftX"),
                              as_number(require(tr, "shiftY", "normalized.transform"), "normalized.transform.shiftY")};
    const auto& degenerate = require(norm, "degenerate", "normalized");
    if (!degenerate.is_boolean()) throw Error(ErrorKind::parse, "expected boolean", "normalized.degenerate");
    t.normalized.degenerate = degenerate.get<bool>();
    t.normalized.source_label = t.label;
    // Reuse the ink reader for the stroke array.
    nlohmann::json shim;
    shim["metadata"] = {{"label", t.label}, {"canvasWidth", 1}, {"canvasHeight", 1}};
    shim["strokes"] = require(norm, "strokes", "normalized");
    t.normalized.strokes = sketch_from_json(shim).strokes;
    t.stroke_count = static_cast<std::size_t>(as_integer(require(j, "strokeCount", ""), "strokeCount"));
    for (const auto& v : as_array(require(j, "perStrokeLengths", ""), "perStrokeLengths"))
      t.per_stroke_lengths.push_back(as_number(v, "perStrokeLengths"));
    for (const auto& v : as_array(require(j, "perStrokeDurations", ""), "perStrokeDurations"))
      t.per_stroke_durations.push_back(as_integer(v, "perStrokeDurations"));
    t.total_duration = as_integer(require(j, "totalDuration", ""), "totalDuration");
    return t;
  } catch (const Error& e) {
    throw Error(e.kind(), e.message(), where + (e.path().empty() ? "" : ":" + e.path()));
  }
}

// Cached measures must agree with recomputation.
inline void check_template(const Template& t) {
  const auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::validation, what, "template " + t.label);
  };
  if (t.label != t.raw.metadata.label) fail("label does not match raw ink");
  if (t.stroke_count != t.raw.strokes.size() || t.stroke_count != t.normalized.strokes.size())
    fail("stroke count mismatch");
  if (t.per_stroke_lengths.size() != t.stroke_count || t.per_stroke_durations.size() != t.stroke_count)
    fail("cached measure count mismatch");
  for (std::size_t i = 0; i < t.stroke_count; ++i) {
    if (t.normalized.strokes[i].size() != t.normalized.resample_count) fail("stroke not resampled");
    if (std::abs(t.per_stroke_lengths[i] - stroke_path_length(t.normalized.strokes[i])) > 1e-9)
      fail("cached stroke length mismatch");
    if (t.per_stroke_durations[i] != stroke_duration(t.raw.strokes[i])) fail("cached stroke duration mismatch");
  }
  if (t.total_duration != sketch_duration(t.raw)) fail("cached total duration mismatch");
}

// ---------------------------------------------------------------------------
// Store

// File-system friendly name for a label: one "uXXXX" token per code point.
inline std::string label_file_stem(const std::string& label) {
  std::string out;
  std::size_t i = 0;
  const auto* s = reinterpret_cast<const unsigned char*>(label.data());
  while (i < label.size()) {
    std::uint32_t cp = s[i];
    std::size_t len = 1;
    if (cp >= 0xF0) { cp &= 0x07; len = 4; }
    else if (cp >= 0xE0) { cp &= 0x0F; len = 3; }
    else if (cp >= 0xC0) { cp &= 0x1F; len = 2; }
    for (std::size_t k = 1; k < len && i + k < label.size(); ++k) cp = (cp << 6) | (s[i + k] & 0x3F);
    i += len;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%su%04" PRIx32, out.empty() ? "" : "_", cp);
    out += buf;
  }
  return out;
}

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class TemplateStore {
 public:
  TemplateStore() = default;

  // Normalizes every catalog character once. `raws` may contain extra
  // (orphan) sketches; they are skipped and reported in `warnings()`.
  static TemplateStore build(const std::vector<Sketch>& raws, Catalog catalog,
                             std::size_t n = kDefaultResampleCount, double size = kDefaultScaleSize) {
    std::map<std::string, const Sketch*> by_label;
    std::vector<std::string> duplicates;
    for (const auto& s : raws)
      if (!by_label.emplace(s.metadata.label, &s).second) duplicates.push_back(s.metadata.label);
    if (!duplicates.empty()) throw Error(ErrorKind::validation, "duplicate template labels: " + join(duplicates));

    TemplateStore store;
    store.resample_n_ = n;
    store.scale_size_ = size;
    std::vector<std::string> missing;
    for (const auto& lesson : catalog.lessons)
      for (const auto& label : lesson.character_labels) {
        if (store.templates_.count(label)) continue;
        auto it = by_label.find(label);
        if (it == by_label.end()) {
          if (std::find(missing.begin(), missing.end(), label) == missing.end()) missing.push_back(label);
          continue;
        }
        store.order_.push_back(label);
        store.templates_.emplace(label, make_template(*it->second, n, size));
      }
    if (!missing.empty()) throw Error(ErrorKind::validation, "catalog labels without templates: " + join(missing));
    for (const auto& [label, _] : by_label)
      if (!store.templates_.count(label)) store.warnings_.push_back("orphan template not in catalog: " + label);
    store.catalog_ = std::move(catalog);
    return store;
  }

  const Template& lookup_template(const std::string& label) const {
    auto it = templates_.find(label);
    if (it == templates_.end()) throw Error(ErrorKind::not_found, "unknown character label", label);
    return it->second;
  }

  bool contains(const std::string& label) const { return templates_.count(label) > 0; }

  const std::vector<Lesson>& list_lessons() const noexcept { return catalog_.lessons; }

  const Lesson& lesson(const std::string& id) const {
    for (const auto& l : catalog_.lessons)
      if (l.id == id) return l;
    throw Error(ErrorKind::not_found, "unknown lesson", id);
  }

  const std::vector<CharacterInfo>& lesson_characters(const std::string& id) const {
    auto it = catalog_.characters.find(id);
    if (it == catalog_.characters.end()) throw Error(ErrorKind::not_found, "unknown lesson", id);
    return it->second;
  }

  // Catalog order of first appearance.
  const std::vector<std::string>& labels() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }
  const Catalog& catalog() const noexcept { return catalog_; }
  std::size_t resample_count() const noexcept { return resample_n_; }
  double scale_size() const noexcept { return scale_size_; }
  const std::string& version() const noexcept { return version_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Writes store.json plus templates/<stem>.json. Output is a pure function
  // of the store contents.
  std::string write(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "templates", ec);
    if (ec) throw Error(ErrorKind::io, "cannot create store directory: " + ec.message(), dir.string());

    nlohmann::ordered_json index;
    index["formatVersion"] = 1;
    index["storeVersion"] = "";
    index["resampleCount"] = resample_n_;
    index["scaleSize"] = scale_size_;
    index["templates"] = nlohmann::ordered_json::array();
    std::uint64_t hash = fnv1a64("kwb-store-1");
    for (const auto& label : order_) {
      const auto file = "templates/" + label_file_stem(label) + ".json";
      const auto text = template_to_json(templates_.at(label)).dump(2) + "\n";
      write_file(dir / file, text);
      hash = fnv1a64(file, hash);
      hash = fnv1a64(text, hash);
      nlohmann::ordered_json entry;
      entry["label"] = label;
      entry["file"] = file;
      entry["strokeCount"] = templates_.at(label).stroke_count;
      index["templates"].push_back(std::move(entry));
    }
    index["catalog"] = catalog_to_json(catalog_);
    hash = fnv1a64(index["catalog"].dump(), hash);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
    version_ = buf;
    index["storeVersion"] = version_;
    write_file(dir / "store.json", index.dump(2) + "\n");
    return version_;
  }

  static TemplateStore load(const std::filesystem::path& dir) {
    const auto index_path = dir / "store.json";
    auto index = parse_file(index_path);
    using namespace detail;
    TemplateStore store;
    try {
      store.resample_n_ =
          static_cast<std::size_t>(as_integer(require(index, "resampleCount", ""), "resampleCount"));
      store.scale_size_ = as_number(require(index, "scaleSize", ""), "scaleSize");
      store.version_ = as_string(require(index, "storeVersion", ""), "storeVersion");
      store.catalog_ = catalog_from_json(require(index, "catalog", ""));
    } catch (const Error& e) {
      throw Error(e.kind(), e.message(), index_path.string() + ":" + e.path());
    }
    for (const auto& entry : detail::as_array(detail::require(index, "templates", ""), "templates")) {
      const auto file = detail::as_string(detail::require(entry, "file", "templates"), "templates.file");
      auto t = template_from_json(parse_file(dir / file), (dir / file).string());
      if (t.normalized.resample_count != store.resample_n_ || t.normalized.size != store.scale_size_)
        throw Error(ErrorKind::validation, "template frame differs from store frame", file);
      check_template(t);
      const auto label = t.label;
      if (!store.templates_.emplace(label, std::move(t)).second)
        throw Error(ErrorKind::validation, "duplicate template labels: " + label, file);
      store.order_.push_back(label);
    }
    std::vector<std::string> missing;
    for (const auto& lesson : store.catalog_.lessons)
      for (const auto& label : lesson.character_labels)
        if (!store.templates_.count(label)) missing.push_back(label);
    if (!missing.empty()) throw Error(ErrorKind::validation, "catalog labels without templates: " + join(missing));
    return store;
  }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
  }

  static void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write file", path.string());
    out << text;
  }

  static nlohmann::json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open file", path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what(), path.string());
    }
  }

  std::unordered_map<std::string, Template> templates_;
  std::vector<std::string> order_;
  Catalog catalog_;
  std::size_t resample_n_ = kDefaultResampleCount;
  double scale_size_ = kDefaultScaleSize;
  std::string version_;
  std::vector<std::string> warnings_;
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open file", path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct PreprocessResult {
  TemplateStore store;
  std::string version;
};

// Reads every *.json ink file in `raw_dir` (sorted by file name) and the
// catalog, normalizes, and writes the store to `out_dir`.
inline PreprocessResult preprocess_templates(const std::filesystem::path& raw_dir,
                                             const std::filesystem::path& catalog_path,
                                             const std::filesystem::path& out_dir,
                                             std::size_t n = kDefaultResampleCount,
                                             double size = kDefaultScaleSize) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(raw_dir)) throw Error(ErrorKind::io, "raw template directory not found", raw_dir.string());
  if (!fs::is_regular_file(catalog_path)) throw Error(ErrorKind::io, "catalog file not found", catalog_path.string());

  Catalog catalog;
  try {
    catalog = catalog_from_json(nlohmann::json::parse(read_text_file(catalog_path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what(), catalog_path.string());
  } catch (const Error& e) {
    throw Error(e.kind(), e.message(), catalog_path.string() + ":" + e.path());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(raw_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<Sketch> raws;
  for (const auto& f : files) {
    try {
      raws.push_back(parse_ink(read_text_file(f)));
    } catch (const Error& e) {
      throw Error(e.kind(), e.message(), f.string() + ":" + e.path());
    }
  }
  auto store = TemplateStore::build(raws, std::move(catalog), n, size);
  auto version = store.write(out_dir);
  return {std::move(store), std::move(version)};
}

}  // namespace kwb
