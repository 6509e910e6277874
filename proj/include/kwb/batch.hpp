#pragma once

// Corpus evaluation: assess every ink file in a directory and emit one CSV
// row per attempt.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "kwb/scoring.hpp"
#include "kwb/template_store.hpp"

namespace kwb {

struct BatchRow {
  std::string file;  // file name relative to the inputs directory
  std::optional<AssessmentReport> report;
  std::optional<Error> error;
};

inline std::vector<std::filesystem::path> list_ink_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::io, "inputs directory not found", dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

// Rows come back in file-name order regardless of worker scheduling.
inline std::vector<BatchRow> batch_assess(const TemplateStore& store, const std::filesystem::path& dir,
                                          const ThresholdConfig& cfg, unsigned workers = 0) {
  const auto files = list_ink_files(dir);
  std::vector<BatchRow> rows(files.size());
  const auto work = [&](std::size_t i) {
    rows[i].file = files[i].filename().string();
    try {
      const auto ink = parse_ink(read_text_file(files[i]));
      rows[i].report = assess_character(store, ink, cfg);
    } catch (const Error& e) {
      rows[i].error = e;
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, files.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) work(i);
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < files.size(); i += workers) work(i);
    });
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_raw(MetricId id, const std::optional<double>& v) {
  if (!v) return {};
  if (id == MetricId::stroke_edit) return std::to_string(static_cast<long long>(*v));
  return nlohmann::json(*v).dump();
}

inline void write_csv_header(std::ostream& out) {
  out << "file,label";
  for (auto id : kAllMetrics) out << ',' << to_string(id) << "_raw";
  for (auto id : kAllMetrics) out << ',' << to_string(id) << "_stars";
  out << '\n';
}

inline void write_csv_row(std::ostream& out, const std::string& file, const AssessmentReport& r) {
  out << csv_field(file) << ',' << csv_field(r.label);
  for (auto id : kAllMetrics) out << ',' << format_raw(id, r.metric(id).raw);
  for (auto id : kAllMetrics) out << ',' << r.metric(id).stars;
  out << '\n';
}

// Files that failed are skipped; returns how many were written.
inline std::size_t write_csv(std::ostream& out, const std::vector<BatchRow>& rows) {
  write_csv_header(out);
  std::size_t written = 0;
  for (const auto& row : rows)
    if (row.report) {
      write_csv_row(out, row.file, *row.report);
      ++written;
    }
  return written;
}

}  // namespace kwb
