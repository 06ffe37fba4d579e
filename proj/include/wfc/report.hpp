// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfc/engine.hpp"
#include "wfc/fault.hpp"
#include "wfc/json_schema.hpp"
#include "wfc/openapi.hpp"
#include "wfc/testgen.hpp"

namespace wfc::report {

struct EndpointResult {
  std::string identity;
  std::vector<int> observed_statuses;  // ascending, unique
  std::vector<int> fault_codes;        // ascending, unique

  friend bool operator==(const EndpointResult&, const EndpointResult&) = default;
};

struct RestReport {
  int endpoint_count = 0;
  std::vector<EndpointResult> endpoints;

  friend bool operator==(const RestReport&, const RestReport&) = default;
};

struct TestCaseInfo {
  std::string name;
  std::string file;
  int start_line = 1;
  int end_line = 1;
  std::vector<std::string> operations_called;
  std::vector<Fault> fault_refs;

  friend bool operator==(const TestCaseInfo&, const TestCaseInfo&) = default;
};

struct Report {
  std::string schema_version;
  std::string tool_name;
  std::string tool_version;
  std::string creation_time;
  std::vector<Fault> faults;
  std::optional<RestReport> rest;  // problem_details.rest
  int total_tests = 0;
  std::vector<std::string> test_file_paths;
  std::vector<TestCaseInfo> test_cases;
  std::optional<std::vector<std::string>> notes;

  friend bool operator==(const Report&, const Report&) = default;
};

class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToolMeta {
  std::string name;
  std::string version;
  std::optional<std::string> creation_time;  // defaults to now
};

/// Per-endpoint aggregation over every exchange of the session, covering
/// every operation of the schema.
RestReport aggregate(const engine::SessionResult& session, const openapi::ApiSchema& schema);

/// Throws ConsistencyError if a test references a file the suite lacks, or
/// if the report breaks one of its own invariants.
Report build_report(const engine::SessionResult& session, const openapi::ApiSchema& schema,
                    const testgen::EmittedSuite& suite, const ToolMeta& meta);

nlohmann::json to_json(const Report& report);
std::string serialize_report(const Report& report);

/// Validates against the shipped report schema first; throws SchemaViolation
/// on the first error.
Report parse_report(std::string_view text);

std::vector<SchemaError> validate_report_json(const nlohmann::json& document);

/// Percentage of schema operations with at least one 2xx response.
double endpoint_2xx_coverage(const engine::SessionResult& session, const openapi::ApiSchema& schema);
/// Operations that answered at least once with 500.
int endpoints_with_500(const engine::SessionResult& session);

double endpoint_2xx_coverage(const RestReport& rest);
int endpoints_with_500(const RestReport& rest);

/// Current UTC time, e.g. `2026-10-19T08:30:00Z`.
std::string rfc3339_now();

}  // namespace wfc::report
