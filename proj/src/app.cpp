// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "wfc/auth_model.hpp"
#include "wfc/document.hpp"
#include "wfc/engine.hpp"
#include "wfc/http.hpp"
#include "wfc/openapi.hpp"
#include "wfc/report.hpp"
#include "wfc/resources.hpp"
#include "wfc/stats.hpp"
#include "wfc/testgen.hpp"
#include "wfc/version.hpp"

namespace wfc::cli {

namespace fs = std::filesystem;

namespace {

int fail(std::ostream& err, int code, const std::string& kind, const std::string& reason) {
  std::string line = reason;
  for (char& c : line) {
    if (c == '\n') c = ' ';
  }
  err << kToolName << ": error[" << kind << "]: " << line << "\n";
  return code;
}

void write_file(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

int run_stats(const std::string& csv_path, bool lower_better, std::ostream& out, std::ostream& err) {
  try {
    auto table = stats::parse_table_csv(read_file(csv_path), lower_better ? stats::Direction::kLowerBetter
                                                                          : stats::Direction::kHigherBetter);
    out << stats::format_summary(table);
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, kExitInvalidConfig, "invalid-config", e.what());
  }
}

}  // namespace

int run(const CliConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
  if (config.duration_seconds < 1) return fail(err, kExitInvalidConfig, "invalid-config", "--duration-seconds must be >= 1");
  if (config.max_tests && *config.max_tests < 1) return fail(err, kExitInvalidConfig, "invalid-config", "--max-tests must be >= 1");

  openapi::ApiSchema schema;
  try {
    if (!fs::exists(config.schema_path)) {
      return fail(err, kExitInvalidConfig, "invalid-config", "schema file not found: " + config.schema_path);
    }
    schema = openapi::load_schema(std::string_view(read_file(config.schema_path)));
  } catch (const std::exception& e) {
    return fail(err, kExitInvalidConfig, "invalid-schema", e.what());
  }

  http::Url origin;
  try {
    origin = http::Url::parse(config.base_url);
  } catch (const std::exception& e) {
    return fail(err, kExitInvalidConfig, "invalid-config", std::string("--base-url: ") + e.what());
  }
  origin.path.clear();

  std::vector<auth::AuthenticationInfo> users;
  if (config.auth_path) {
    try {
      auto file = auth::parse_auth_file(read_file(*config.auth_path));
      auto violations = auth::validate_auth_file(file);
      if (!violations.empty()) {
        return fail(err, kExitInvalidConfig, "invalid-auth",
                    std::string(auth::to_string(violations.front().code)) + " at " + violations.front().path);
      }
      users = auth::resolve_template(file);
    } catch (const std::exception& e) {
      return fail(err, kExitInvalidConfig, "invalid-auth", e.what());
    }
  }

  engine::SessionConfig session_config;
  session_config.schema = schema;
  session_config.base_url = openapi::resolve_base_url(schema, origin);
  session_config.auth_entries = users;
  session_config.budget_seconds = config.duration_seconds;
  session_config.max_tests = config.max_tests;
  if (config.seed) {
    session_config.rng_seed = *config.seed;
  } else {
    std::random_device device;
    session_config.rng_seed = (static_cast<std::uint64_t>(device()) << 32) | device();
    out << "seed: " << session_config.rng_seed << "\n";
  }

  for (const auto& issue : schema.issues) {
    err << kToolName << ": schema-issue[" << (issue.severity == openapi::SchemaIssue::Severity::kDegraded ? "degraded" : "warning")
        << "]: " << (issue.location.empty() ? "/" : issue.location) << ": " << issue.message << "\n";
  }

  http::HttplibTransport transport;
  engine::SessionResult session;
  try {
    session = engine::run_session(session_config, transport, stop);
  } catch (const engine::TargetUnreachable& e) {
    return fail(err, kExitUnreachable, "unreachable", e.what());
  }

  const fs::path dir(config.output_dir);
  try {
    auto selection = testgen::select_suite(session);
    auto suite = testgen::emit_suite(selection, session, schema, session_config.base_url, users);
    auto report = report::build_report(session, schema, suite, {kToolName, kToolVersion, std::nullopt});
    for (const auto& f : suite.files) write_file(dir / f.path, f.text);
    write_file(dir / "report.json", report::serialize_report(report));
    if (config.emit_viewer) {
      for (const auto& f : resources::viewer_files()) {
        fs::path target = dir / std::string(f.path);
        write_file(target, f.content);
        if (target.extension() == ".py" || target.extension() == ".command") {
          fs::permissions(target, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                          fs::perm_options::add);
        }
      }
    }
    out << "calls: " << session.calls_made << ", tests sampled: " << session.tests.size()
        << ", tests emitted: " << report.total_tests << ", faults: " << report.faults.size() << "\n";
    out << "2xx endpoint coverage: " << report::endpoint_2xx_coverage(session, schema)
        << "%, endpoints with 500: " << report::endpoints_with_500(session) << "\n";
    out << "output: " << dir.string() << "\n";
  } catch (const std::exception& e) {
    return fail(err, kExitInvalidConfig, "output", e.what());
  }
  if (session.interrupted) out << "session interrupted; partial results written\n";
  return schema.issues.empty() ? kExitOk : kExitSchemaIssues;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
  CLI::App app{"Black-box REST API fuzzer producing pytest suites and WFC reports", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  CliConfig config;
  std::uint64_t seed = 0;
  app.add_option("--schema", config.schema_path, "Path to the OpenAPI v2/v3 schema (JSON or YAML)");
  app.add_option("--base-url", config.base_url, "Where the API is running, e.g. http://localhost:8080");
  app.add_option("--duration-seconds", config.duration_seconds, "Fuzzing budget in seconds")->capture_default_str();
  auto* auth_opt = app.add_option("--auth", "Authentication configuration file (auth.yaml)")->type_name("FILE");
  app.add_option("--output", config.output_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Random seed; drawn from entropy and printed when omitted");
  auto* max_tests_opt = app.add_option("--max-tests", "Stop after this many test cases even if budget remains")->type_name("INT");
  bool no_viewer = false;
  app.add_flag("--no-viewer", no_viewer, "Do not write the web report assets");

  auto* stats_cmd = app.add_subcommand("stats", "Summarize a result matrix CSV (Average/Median and Friedman)");
  std::string csv_path;
  bool lower_better = false;
  stats_cmd->add_option("csv", csv_path, "CSV with a label column and one column per treatment")->required();
  stats_cmd->add_flag("--lower-better", lower_better, "Rank 1 goes to the smallest value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << app.help();
    return fail(err, kExitInvalidConfig, "invalid-config", e.what());
  }

  if (stats_cmd->parsed()) return run_stats(csv_path, lower_better, out, err);

  if (config.schema_path.empty() || config.base_url.empty()) {
    err << app.help();
    return fail(err, kExitInvalidConfig, "invalid-config",
                config.schema_path.empty() ? "--schema is required" : "--base-url is required");
  }
  if (auth_opt->count() > 0) config.auth_path = auth_opt->as<std::string>();
  if (seed_opt->count() > 0) config.seed = seed;
  if (max_tests_opt->count() > 0) config.max_tests = max_tests_opt->as<int>();
  config.emit_viewer = !no_viewer;
  return run(config, out, err, stop);
}

}  // namespace wfc::cli
