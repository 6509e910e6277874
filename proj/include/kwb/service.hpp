#pragma once

// JSON service: lessons, templates, practice assessment and forward-only
// quiz sessions. `Service::handle` is transport independent; http_server.hpp
// binds it to HTTP.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kwb/error.hpp"
#include "kwb/ink.hpp"
#include "kwb/scoring.hpp"
#include "kwb/template_store.hpp"
#include "kwb/thresholds.hpp"

namespace kwb {

struct Request {
  std::string method;
  std::string path;  // already percent-decoded, no query string
  std::string body;
  std::string student_id;  // X-Student-Id, may be empty
};

struct Response {
  int status = 200;
  std::string body;
};

inline int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::validation:
    case ErrorKind::argument: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::conflict: return 409;
    case ErrorKind::empty_sketch: return 422;
    case ErrorKind::config:
    case ErrorKind::io: return 500;
  }
  return 500;
}

inline Response error_response(const Error& e) {
  nlohmann::ordered_json j;
  j["error"]["kind"] = to_string(e.kind());
  j["error"]["message"] = e.message();
  j["error"]["path"] = e.path();
  return {http_status(e.kind()), j.dump()};
}

enum class QuizState { in_progress, complete };

struct QuizSession {
  std::string session_id;
  std::string lesson_id;
  std::vector<std::string> labels;
  std::size_t cursor = 0;
  std::vector<AssessmentReport> collected;

  QuizState state() const noexcept { return cursor == labels.size() ? QuizState::complete : QuizState::in_progress; }
};

// Append-only JSON-lines log of submitted ink and reports.
class SubmissionLog {
 public:
  explicit SubmissionLog(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create persistence directory: " + ec.message(), dir.string());
    out_.open(dir / "submissions.jsonl", std::ios::binary | std::ios::app);
    if (!out_) throw Error(ErrorKind::io, "cannot open submission log", (dir / "submissions.jsonl").string());
  }

  void append(const nlohmann::ordered_json& record) {
    std::lock_guard lock(mu_);
    out_ << record.dump() << '\n';
    out_.flush();
  }

  void flush() {
    std::lock_guard lock(mu_);
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

class Service {
 public:
  Service(std::shared_ptr<const TemplateStore> store, ThresholdConfig cfg,
          std::optional<std::filesystem::path> persist_dir = std::nullopt)
      : store_(std::move(store)), cfg_(std::move(cfg)) {
    validate(cfg_);
    if (cfg_.resample_n != store_->resample_count() || cfg_.scale_size != store_->scale_size())
      throw Error(ErrorKind::config, "threshold config frame (resampleCount/scaleSize) differs from the template store");
    if (persist_dir) log_ = std::make_unique<SubmissionLog>(*persist_dir);
  }

  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      return error_response(e);
    }
  }

  void flush() {
    if (log_) log_->flush();
  }

  const TemplateStore& store() const noexcept { return *store_; }
  const ThresholdConfig& config() const noexcept { return cfg_; }

 private:
  struct Slot {
    std::mutex mu;
    QuizSession session;
  };

  static std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
      if (path[i] == '/') {
        ++i;
        continue;
      }
      auto j = path.find('/', i);
      if (j == std::string_view::npos) j = path.size();
      parts.emplace_back(path.substr(i, j - i));
      i = j;
    }
    return parts;
  }

  static Response ok(const nlohmann::ordered_json& j) { return {200, j.dump()}; }

  Response route(const Request& req) {
    const auto parts = split_path(req.path);
    const auto& m = req.method;
    if (parts.size() < 2 || parts[0] != "api") throw Error(ErrorKind::not_found, "no such endpoint", req.path);

    if (parts[1] == "lessons") {
      if (m != "GET") return method_not_allowed();
      if (parts.size() == 2) return ok(lessons_json());
      if (parts.size() == 3) return ok(lesson_json(parts[2]));
    } else if (parts[1] == "characters" && parts.size() == 4 && parts[3] == "template") {
      if (m != "GET") return method_not_allowed();
      return ok(template_json(store_->lookup_template(parts[2])));
    } else if (parts[1] == "assess" && parts.size() == 2) {
      if (m != "POST") return method_not_allowed();
      return assess(req);
    } else if (parts[1] == "quiz") {
      if (parts.size() == 2) {
        if (m != "POST") return method_not_allowed();
        return start_quiz(req);
      }
      if (parts.size() == 3 && m == "GET") return ok(session_json(*find_slot(parts[2])));
      if (parts.size() == 4 && parts[3] == "submit") {
        if (m != "POST") return method_not_allowed();
        return submit(parts[2], req);
      }
      if (parts.size() == 4 && parts[3] == "summary") {
        if (m != "GET") return method_not_allowed();
        return summary(parts[2]);
      }
    }
    throw Error(ErrorKind::not_found, "no such endpoint", req.path);
  }

  static Response method_not_allowed() {
    nlohmann::ordered_json j;
    j["error"]["kind"] = "method";
    j["error"]["message"] = "method not allowed";
    j["error"]["path"] = "";
    return {405, j.dump()};
  }

  nlohmann::ordered_json lessons_json() const {
    nlohmann::ordered_json j;
    j["lessons"] = nlohmann::ordered_json::array();
    for (const auto& l : store_->list_lessons()) {
      nlohmann::ordered_json jl;
      jl["id"] = l.id;
      jl["title"] = l.title;
      jl["characters"] = l.character_labels;
      j["lessons"].push_back(std::move(jl));
    }
    return j;
  }

  nlohmann::ordered_json lesson_json(const std::string& id) const {
    const auto& lesson = store_->lesson(id);
    nlohmann::ordered_json j;
    j["id"] = lesson.id;
    j["title"] = lesson.title;
    j["characters"] = nlohmann::ordered_json::array();
    for (const auto& info : store_->lesson_characters(id)) j["characters"].push_back(character_info_to_json(info));
    return j;
  }

  static nlohmann::ordered_json template_json(const Template& t) {
    nlohmann::ordered_json j;
    j["label"] = t.label;
    j["strokeCount"] = t.stroke_count;
    j["canvas"]["width"] = t.raw.metadata.canvas_width;
    j["canvas"]["height"] = t.raw.metadata.canvas_height;
    j["normalized"]["resampleCount"] = t.normalized.resample_count;
    j["normalized"]["scaleSize"] = t.normalized.size;
    j["normalized"]["strokes"] = strokes_to_json(t.normalized.strokes);
    // Replay uses the expert's raw ink so Demo/Steps animate in canvas space
    // with the recorded timing.
    j["replay"]["strokes"] = strokes_to_json(t.raw.strokes);
    j["replay"]["strokeDurations"] = t.per_stroke_durations;
    j["replay"]["totalDuration"] = t.total_duration;
    return j;
  }

  static Sketch parse_body_ink(const nlohmann::json& doc) { return sketch_from_json(doc); }

  static nlohmann::json parse_json(const std::string& body) {
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what(), "$");
    }
  }

  Response assess(const Request& req) {
    auto ink = parse_body_ink(parse_json(req.body));
    const auto report = assess_character(*store_, ink, cfg_);
    auto body = serialize_report(report);
    if (log_) {
      nlohmann::ordered_json rec;
      rec["mode"] = "practice";
      rec["studentId"] = req.student_id;
      rec["ink"] = sketch_to_json(ink);
      rec["report"] = report_to_json(report);
      log_->append(rec);
    }
    return {200, std::move(body)};
  }

  nlohmann::ordered_json session_json(Slot& slot) {
    std::lock_guard lock(slot.mu);
    return session_json_locked(slot.session);
  }

  static nlohmann::ordered_json session_json_locked(const QuizSession& s) {
    nlohmann::ordered_json j;
    j["sessionId"] = s.session_id;
    j["lessonId"] = s.lesson_id;
    j["cursor"] = s.cursor;
    j["length"] = s.labels.size();
    j["state"] = s.state() == QuizState::complete ? "complete" : "in_progress";
    j["next"] = s.cursor < s.labels.size() ? nlohmann::ordered_json(s.labels[s.cursor]) : nlohmann::ordered_json(nullptr);
    return j;
  }

  Response start_quiz(const Request& req) {
    const auto doc = parse_json(req.body);
    if (!doc.is_object() || !doc.contains("lessonId") || !doc["lessonId"].is_string())
      throw Error(ErrorKind::parse, "expected string", "lessonId");
    const auto& lesson = store_->lesson(doc["lessonId"].get<std::string>());
    auto slot = std::make_shared<Slot>();
    slot->session.session_id = "quiz-" + std::to_string(++next_session_);
    slot->session.lesson_id = lesson.id;
    slot->session.labels = lesson.character_labels;
    auto j = session_json_locked(slot->session);
    {
      std::lock_guard lock(sessions_mu_);
      sessions_.emplace(slot->session.session_id, slot);
    }
    return ok(j);
  }

  std::shared_ptr<Slot> find_slot(const std::string& sid) {
    std::lock_guard lock(sessions_mu_);
    auto it = sessions_.find(sid);
    if (it == sessions_.end()) throw Error(ErrorKind::not_found, "unknown quiz session", sid);
    return it->second;
  }

  // Body is either bare ink or {"index": k, "ink": {...}}; a stated index
  // must equal the cursor.
  Response submit(const std::string& sid, const Request& req) {
    auto slot = find_slot(sid);
    std::lock_guard lock(slot->mu);
    auto& s = slot->session;
    if (s.state() == QuizState::complete) throw Error(ErrorKind::conflict, "quiz already complete", sid);

    const auto doc = parse_json(req.body);
    const nlohmann::json* ink_doc = &doc;
    if (doc.is_object() && doc.contains("ink")) {
      if (auto it = doc.find("index"); it != doc.end()) {
        if (!it->is_number_integer()) throw Error(ErrorKind::parse, "expected integer", "index");
        if (it->get<long long>() != static_cast<long long>(s.cursor))
          throw Error(ErrorKind::conflict,
                      "submission index " + it->dump() + " does not match cursor " + std::to_string(s.cursor), "index");
      }
      ink_doc = &doc["ink"];
    }
    auto ink = parse_body_ink(*ink_doc);
    const auto& expected = s.labels[s.cursor];
    if (ink.metadata.label != expected)
      throw Error(ErrorKind::conflict, "expected character " + expected + " at position " + std::to_string(s.cursor),
                  "metadata.label");
    auto report = assess_character(*store_, ink, cfg_);
    if (log_) {
      nlohmann::ordered_json rec;
      rec["mode"] = "quiz";
      rec["studentId"] = req.student_id;
      rec["sessionId"] = s.session_id;
      rec["index"] = s.cursor;
      rec["ink"] = sketch_to_json(ink);
      rec["report"] = report_to_json(report);
      log_->append(rec);
    }
    nlohmann::ordered_json j;
    j["report"] = report_to_json(report);
    s.collected.push_back(std::move(report));
    ++s.cursor;
    const auto state = session_json_locked(s);
    for (const auto& [k, v] : state.items()) j[k] = v;
    return ok(j);
  }

  Response summary(const std::string& sid) {
    auto slot = find_slot(sid);
    std::lock_guard lock(slot->mu);
    const auto& s = slot->session;
    if (s.state() != QuizState::complete)
      throw Error(ErrorKind::conflict, "quiz not complete: " + std::to_string(s.cursor) + " of " +
                                           std::to_string(s.labels.size()) + " submitted", sid);
    return ok(quiz_report_to_json(quiz_summary(s.lesson_id, s.collected)));
  }

  std::shared_ptr<const TemplateStore> store_;
  ThresholdConfig cfg_;
  std::unique_ptr<SubmissionLog> log_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::atomic<std::uint64_t> next_session_{0};
};

}  // namespace kwb
