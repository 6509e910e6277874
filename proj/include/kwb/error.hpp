#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kwb {

enum class ErrorKind {
  parse,        // malformed document or schema violation
  validation,   // well-formed but violates an invariant
  empty_sketch, // nothing to assess
  not_found,
  argument,
  conflict,     // state machine violation (quiz)
  config,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::empty_sketch: return "empty_sketch";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::argument: return "argument";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Single exception type for the library. `path` locates the offending
// element for schema errors (e.g. "metadata.label", "strokes[2].points[0].t").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        kind_(kind),
        message_(std::move(message)),
        path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string message_;
  std::string path_;
};

}  // namespace kwb
