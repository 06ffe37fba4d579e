// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <map>
#include <set>

#include "wfc/document.hpp"
#include "wfc/oracles.hpp"
#include "wfc/resources.hpp"
#include "wfc/version.hpp"

namespace wfc::report {

namespace {

using nlohmann::json;

json fault_json(const Fault& f) {
  json j = {{"code", f.code}, {"endpoint", f.endpoint}};
  if (f.context) j["context"] = *f.context;
  return j;
}

Fault fault_from(const json& j) {
  Fault f;
  f.code = j.at("code").get<int>();
  f.endpoint = j.at("endpoint").get<std::string>();
  if (j.contains("context")) f.context = j["context"].get<std::string>();
  return f;
}

const JsonSchemaValidator& validator() {
  static const JsonSchemaValidator v(parse_document(resources::report_schema(), DocumentFormat::kYaml));
  return v;
}

}  // namespace

RestReport aggregate(const engine::SessionResult& session, const openapi::ApiSchema& schema) {
  std::map<std::string, std::set<int>> statuses;
  std::map<std::string, std::set<int>> codes;
  for (const auto& ex : session.exchanges) {
    if (ex.status) statuses[ex.action.operation].insert(*ex.status);
  }
  for (const auto& f : session.faults) codes[f.endpoint].insert(f.code);

  RestReport rest;
  std::set<std::string> listed;
  auto add = [&](const std::string& identity) {
    if (!listed.insert(identity).second) return;
    EndpointResult e;
    e.identity = identity;
    e.observed_statuses.assign(statuses[identity].begin(), statuses[identity].end());
    e.fault_codes.assign(codes[identity].begin(), codes[identity].end());
    rest.endpoints.push_back(std::move(e));
  };
  for (const auto& op : schema.operations) add(op.identity());
  for (const auto& [identity, s] : statuses) add(identity);
  rest.endpoint_count = static_cast<int>(rest.endpoints.size());
  return rest;
}

Report build_report(const engine::SessionResult& session, const openapi::ApiSchema& schema,
                    const testgen::EmittedSuite& suite, const ToolMeta& meta) {
  Report r;
  r.schema_version = kReportSchemaVersion;
  r.tool_name = meta.name;
  r.tool_version = meta.version;
  r.creation_time = meta.creation_time.value_or(rfc3339_now());
  r.faults = session.faults;
  r.rest = aggregate(session, schema);
  for (const auto& f : suite.files) {
    if (std::find(r.test_file_paths.begin(), r.test_file_paths.end(), f.path) == r.test_file_paths.end()) {
      r.test_file_paths.push_back(f.path);
    }
  }
  for (const auto& t : suite.tests) {
    if (std::find(r.test_file_paths.begin(), r.test_file_paths.end(), t.file) == r.test_file_paths.end()) {
      throw ConsistencyError("test " + t.name + " references unknown file " + t.file);
    }
    if (t.start_line < 1 || t.end_line < t.start_line) throw ConsistencyError("bad line range for test " + t.name);
    r.test_cases.push_back({t.name, t.file, t.start_line, t.end_line, t.operations_called, t.faults});
  }
  r.total_tests = static_cast<int>(r.test_cases.size());
  for (const auto& f : r.faults) {
    if (oracles::find_category(f.code) == nullptr) {
      throw ConsistencyError("fault code " + std::to_string(f.code) + " is not in the catalog");
    }
  }
  if (!session.notes.empty()) r.notes = session.notes;
  return r;
}

json to_json(const Report& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["tool_name"] = r.tool_name;
  j["tool_version"] = r.tool_version;
  j["creation_time"] = r.creation_time;
  j["faults"] = json::array();
  for (const auto& f : r.faults) j["faults"].push_back(fault_json(f));
  if (r.rest) {
    json endpoints = json::array();
    for (const auto& e : r.rest->endpoints) {
      endpoints.push_back(
          {{"identity", e.identity}, {"observed_statuses", e.observed_statuses}, {"fault_codes", e.fault_codes}});
    }
    j["problem_details"] = {{"rest", {{"endpoint_count", r.rest->endpoint_count}, {"endpoints", endpoints}}}};
  }
  j["total_tests"] = r.total_tests;
  j["test_file_paths"] = r.test_file_paths;
  j["test_cases"] = json::array();
  for (const auto& t : r.test_cases) {
    json refs = json::array();
    for (const auto& f : t.fault_refs) refs.push_back(fault_json(f));
    j["test_cases"].push_back({{"name", t.name},
                               {"file", t.file},
                               {"start_line", t.start_line},
                               {"end_line", t.end_line},
                               {"operations_called", t.operations_called},
                               {"fault_refs", refs}});
  }
  if (r.notes) j["notes"] = *r.notes;
  return j;
}

std::string serialize_report(const Report& report) { return to_json(report).dump(2) + "\n"; }

std::vector<SchemaError> validate_report_json(const json& document) { return validator().validate(document); }

Report parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report is not JSON: ") + e.what());
  }
  auto errors = validate_report_json(j);
  if (!errors.empty()) throw SchemaViolation(errors.front().path, errors.front().message);

  Report r;
  r.schema_version = j["schema_version"].get<std::string>();
  r.tool_name = j["tool_name"].get<std::string>();
  r.tool_version = j["tool_version"].get<std::string>();
  r.creation_time = j["creation_time"].get<std::string>();
  for (const auto& f : j["faults"]) r.faults.push_back(fault_from(f));
  if (j.contains("problem_details") && j["problem_details"].contains("rest")) {
    const auto& rest = j["problem_details"]["rest"];
    RestReport out;
    out.endpoint_count = rest["endpoint_count"].get<int>();
    for (const auto& e : rest["endpoints"]) {
      out.endpoints.push_back({e["identity"].get<std::string>(), e["observed_statuses"].get<std::vector<int>>(),
                               e["fault_codes"].get<std::vector<int>>()});
    }
    r.rest = std::move(out);
  }
  r.total_tests = j["total_tests"].get<int>();
  r.test_file_paths = j["test_file_paths"].get<std::vector<std::string>>();
  for (const auto& t : j["test_cases"]) {
    TestCaseInfo info;
    info.name = t["name"].get<std::string>();
    info.file = t["file"].get<std::string>();
    info.start_line = t["start_line"].get<int>();
    info.end_line = t["end_line"].get<int>();
    info.operations_called = t["operations_called"].get<std::vector<std::string>>();
    for (const auto& f : t["fault_refs"]) info.fault_refs.push_back(fault_from(f));
    r.test_cases.push_back(std::move(info));
  }
  if (j.contains("notes")) r.notes = j["notes"].get<std::vector<std::string>>();
  return r;
}

double endpoint_2xx_coverage(const engine::SessionResult& session, const openapi::ApiSchema& schema) {
  if (schema.operations.empty()) return 0;
  std::set<std::string> covered;
  for (const auto& ex : session.exchanges) {
    if (ex.status && *ex.status >= 200 && *ex.status <= 299) covered.insert(ex.action.operation);
  }
  std::size_t hits = 0;
  for (const auto& op : schema.operations) hits += covered.count(op.identity());
  return 100.0 * static_cast<double>(hits) / static_cast<double>(schema.operations.size());
}

int endpoints_with_500(const engine::SessionResult& session) {
  std::set<std::string> ops;
  for (const auto& ex : session.exchanges) {
    if (ex.status && *ex.status == 500) ops.insert(ex.action.operation);
  }
  return static_cast<int>(ops.size());
}

double endpoint_2xx_coverage(const RestReport& rest) {
  if (rest.endpoints.empty()) return 0;
  std::size_t hits = 0;
  for (const auto& e : rest.endpoints) {
    hits += std::any_of(e.observed_statuses.begin(), e.observed_statuses.end(),
                        [](int s) { return s >= 200 && s <= 299; });
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(rest.endpoints.size());
}

int endpoints_with_500(const RestReport& rest) {
  return static_cast<int>(std::count_if(rest.endpoints.begin(), rest.endpoints.end(), [](const EndpointResult& e) {
    return std::find(e.observed_statuses.begin(), e.observed_statuses.end(), 500) != e.observed_statuses.end();
  }));
}

std::string rfc3339_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace wfc::report
