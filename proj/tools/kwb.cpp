// kwb: preprocess template stores, assess ink, batch-score corpora and
// serve the JSON API.
//
// Exit codes: 0 ok, 2 input error, 3 not found, 4 environment (e.g. port in use).

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "kwb/batch.hpp"
#include "kwb/http_server.hpp"
#include "kwb/kwb.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitEnvironment = 4;

int exit_code(const kwb::Error& e) { return e.kind() == kwb::ErrorKind::not_found ? kExitNotFound : kExitInput; }

int fail(const kwb::Error& e) {
  std::cerr << "kwb: " << kwb::to_string(e.kind()) << " error: " << e.what() << '\n';
  return exit_code(e);
}

kwb::ThresholdConfig load_config(const std::string& path) {
  return path.empty() ? kwb::ThresholdConfig{} : kwb::load_thresholds(path);
}

std::string stars_glyphs(int stars) {
  std::string out;
  for (int i = 1; i <= 3; ++i) out += i <= stars ? "★" : "☆";
  return out;
}

void print_table(std::ostream& out, const kwb::AssessmentReport& r) {
  out << "character: " << r.label << "\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-18s %-22s %s\n", "metric", "raw", "stars");
  out << line;
  for (auto id : kwb::kAllMetrics) {
    const auto& e = r.metric(id);
    const auto raw = e.raw ? kwb::format_raw(id, e.raw) : std::string("n/a");
    std::snprintf(line, sizeof line, "%-18s %-22s ", std::string(kwb::to_string(id)).c_str(), raw.c_str());
    out << line << stars_glyphs(e.stars) << "\n";
  }
}

int run_preprocess(const std::string& raw, const std::string& catalog, const std::string& out_dir,
                   const std::string& thresholds) {
  const auto cfg = load_config(thresholds);
  auto result = kwb::preprocess_templates(raw, catalog, out_dir, cfg.resample_n, cfg.scale_size);
  for (const auto& label : result.store.labels()) {
    const auto& t = result.store.lookup_template(label);
    std::cout << label << "\t" << t.stroke_count << " stroke(s)\ttemplates/" << kwb::label_file_stem(label)
              << ".json\n";
  }
  for (const auto& w : result.store.warnings()) std::cerr << "kwb: warning: " << w << '\n';
  std::cout << "store " << result.version << " written to " << out_dir << " (" << result.store.size()
            << " templates)\n";
  return kExitOk;
}

int run_assess(const std::string& store_dir, const std::string& input, const std::string& thresholds, bool table) {
  const auto cfg = load_config(thresholds);
  const auto store = kwb::TemplateStore::load(store_dir);
  const auto ink = kwb::parse_ink(kwb::read_text_file(input));
  const auto report = kwb::assess_character(store, ink, cfg);
  if (table)
    print_table(std::cout, report);
  else
    std::cout << kwb::serialize_report(report) << '\n';
  return kExitOk;
}

int run_batch(const std::string& store_dir, const std::string& inputs, const std::string& csv,
              const std::string& thresholds) {
  const auto cfg = load_config(thresholds);
  const auto store = kwb::TemplateStore::load(store_dir);
  const auto rows = kwb::batch_assess(store, inputs, cfg);
  std::size_t failed = 0;
  for (const auto& row : rows)
    if (row.error) {
      ++failed;
      std::cerr << "kwb: " << row.file << ": " << row.error->what() << '\n';
    }
  if (csv == "-") {
    kwb::write_csv(std::cout, rows);
  } else {
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    if (!out) throw kwb::Error(kwb::ErrorKind::io, "cannot write CSV", csv);
    kwb::write_csv(out, rows);
  }
  std::cerr << "kwb: " << rows.size() - failed << " row(s) written, " << failed << " failed\n";
  return failed ? kExitInput : kExitOk;
}

int run_serve(const std::string& host, int port, const std::string& store_dir, const std::string& thresholds,
              const std::string& persist) {
  // Block termination signals before any thread exists; a dedicated thread
  // waits for them and stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const auto cfg = load_config(thresholds);
  auto store = std::make_shared<const kwb::TemplateStore>(kwb::TemplateStore::load(store_dir));
  std::optional<std::filesystem::path> persist_dir;
  if (!persist.empty()) persist_dir = persist;
  kwb::Service service(store, cfg, persist_dir);
  kwb::HttpServer server(service);

  int bound = port;
  if (port == 0) {
    bound = server.bind_any(host);
    if (bound < 0) {
      std::cerr << "kwb: cannot bind " << host << '\n';
      return kExitEnvironment;
    }
  } else if (!server.bind(host, port)) {
    std::cerr << "kwb: cannot bind " << host << ":" << port << " (port in use?)\n";
    return kExitEnvironment;
  }

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  std::cout << "kwb: listening on http://" << host << ":" << bound << " (" << store->size() << " templates)"
            << std::endl;
  server.listen();
  service.flush();
  if (waiter.joinable()) {
    // listen() can also return on its own; wake the waiter so it exits.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  std::cout << "kwb: shut down" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character writing assessment: template stores, scoring and service"};
  app.require_subcommand(1);

  std::string raw, catalog, out_dir, store_dir, input, inputs, csv, thresholds, persist, host = "127.0.0.1";
  int port = 8080;
  bool as_json = false, as_table = false;

  auto* pre = app.add_subcommand("preprocess", "Normalize raw expert ink into a template store");
  pre->add_option("--raw", raw, "Directory of raw template ink JSON")->required();
  pre->add_option("--catalog", catalog, "Lesson catalog JSON")->required();
  pre->add_option("--out", out_dir, "Output store directory")->required();
  pre->add_option("--thresholds", thresholds, "ThresholdConfig JSON (resampleCount, scaleSize)");

  auto* assess = app.add_subcommand("assess", "Assess one ink file against its template");
  assess->add_option("--store", store_dir, "Template store directory")->required();
  assess->add_option("--input", input, "Ink JSON file")->required();
  assess->add_option("--thresholds", thresholds, "ThresholdConfig JSON");
  auto* json_flag = assess->add_flag("--json", as_json, "Print the report as JSON (default)");
  assess->add_flag("--table", as_table, "Print a ten-row star table")->excludes(json_flag);

  auto* batch = app.add_subcommand("batch", "Assess every ink file in a directory into CSV");
  batch->add_option("--store", store_dir, "Template store directory")->required();
  batch->add_option("--inputs", inputs, "Directory of ink JSON files")->required();
  batch->add_option("--csv", csv, "Output CSV file ('-' for stdout)")->required();
  batch->add_option("--thresholds", thresholds, "ThresholdConfig JSON");

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve->add_option("--port", port, "Port (0 picks a free port)")->envname("KWB_PORT");
  serve->add_option("--host", host, "Bind address")->envname("KWB_HOST");
  serve->add_option("--store", store_dir, "Template store directory")->envname("KWB_STORE")->required();
  serve->add_option("--thresholds", thresholds, "ThresholdConfig JSON")->envname("KWB_THRESHOLDS");
  serve->add_option("--persist", persist, "Directory for the submission log")->envname("KWB_PERSIST");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*pre) return run_preprocess(raw, catalog, out_dir, thresholds);
    if (*assess) return run_assess(store_dir, input, thresholds, as_table);
    if (*batch) return run_batch(store_dir, inputs, csv, thresholds);
    if (*serve) return run_serve(host, port, store_dir, thresholds, persist);
  } catch (const kwb::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    std::cerr << "kwb: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
