// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wfc/auth_model.hpp"
#include "wfc/engine.hpp"
#include "wfc/fault.hpp"
#include "wfc/openapi.hpp"

namespace wfc::testgen {

enum class SelectionReason { kFaultRevealing, kCoverageNovel };

struct SuiteSelection {
  std::vector<std::size_t> selected;  // test ids, session order
  std::vector<SelectionReason> reasons;
};

/// Faults a test witnesses (deduplicated) and the (operation, status family)
/// pairs it observes.
std::vector<Fault> test_faults(const engine::SessionResult& session, const engine::TestCase& test);
std::vector<std::pair<std::string, std::string>> test_pairs(const engine::SessionResult& session,
                                                           const engine::TestCase& test);

/// Greedy cover: one minimal witness per fault, then per uncovered
/// (operation, status family) pair; ties go to fewer actions, then the
/// earlier test. A final pass drops tests whose witnesses are all covered by
/// the rest. Tests with transport errors are never selected.
SuiteSelection select_suite(const engine::SessionResult& session);

enum class Dialect { kPythonPytest };

struct EmittedFile {
  std::string path;  // relative to the output directory
  std::string text;
};

struct EmittedTest {
  std::string name;
  std::string file;
  int start_line = 0;  // 1-based, inclusive
  int end_line = 0;
  std::size_t test_id = 0;
  std::vector<std::string> operations_called;
  std::vector<Fault> faults;
};

struct EmittedSuite {
  std::vector<EmittedFile> files;
  std::vector<EmittedTest> tests;
};

class EmitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmitOptions {
  std::string default_base_url = "http://localhost:8080";  // overridden by SUT_BASE_URL
  int per_test_timeout_seconds = 60;
  int request_timeout_seconds = 10;
};

/// Field names whose values are too volatile to assert on.
bool is_volatile_field(const std::string& name);

EmittedSuite emit_suite(const SuiteSelection& selection, const engine::SessionResult& session,
                        const openapi::ApiSchema& schema, const http::Url& base_url,
                        const std::vector<auth::AuthenticationInfo>& auth_entries,
                        Dialect dialect = Dialect::kPythonPytest, const EmitOptions& options = {});

}  // namespace wfc::testgen
