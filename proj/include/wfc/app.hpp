// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace wfc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitSchemaIssues = 2,
  kExitUnreachable = 3,
  kExitInvalidConfig = 4,
};

struct CliConfig {
  std::string schema_path;
  std::string base_url;  // scheme://host:port; any path is ignored
  int duration_seconds = 60;
  std::optional<std::string> auth_path;
  std::string output_dir = "./wfc-out";
  std::optional<std::uint64_t> seed;
  bool emit_viewer = true;
  std::optional<int> max_tests;
};

/// Ingest, authenticate, fuzz, select, emit and report. Errors print one
/// `wfcfuzz: error[<kind>]: <reason>` line to `err`.
int run(const CliConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop = nullptr);

/// Parses the command line (`wfcfuzz [flags]` or `wfcfuzz stats ...`) and
/// dispatches.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
             const std::atomic<bool>* stop = nullptr);

}  // namespace wfc::cli
