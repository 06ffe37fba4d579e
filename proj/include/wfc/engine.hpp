// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfc/auth_model.hpp"
#include "wfc/fault.hpp"
#include "wfc/http.hpp"
#include "wfc/openapi.hpp"

namespace wfc::engine {

using Rng = std::mt19937_64;

struct SessionConfig {
  openapi::ApiSchema schema;
  http::Url base_url;  // origin plus the schema path prefix
  std::vector<auth::AuthenticationInfo> auth_entries;
  int budget_seconds = 60;
  std::uint64_t rng_seed = 0;
  int max_actions_per_test = 5;
  double invalid_probability = 0.2;
  std::optional<int> max_tests;  // stop early after this many tests
  std::chrono::milliseconds min_request_delay{0};
};

/// Throws std::invalid_argument when an invariant does not hold.
void validate_config(const SessionConfig& config);

enum class Intent { kValid, kInvalid };

std::string_view to_string(Intent intent);

/// The one constraint an invalid action breaks on purpose.
struct ViolationRecord {
  std::string constraint;  // enum, type, minimum, maximum, minLength, maxLength, pattern, required-missing
  std::string target;      // e.g. `query.status`, `body.name`

  friend bool operator==(const ViolationRecord&, const ViolationRecord&) = default;
};

using Bindings = std::vector<std::pair<std::string, nlohmann::json>>;

struct HttpAction {
  std::size_t operation_index = 0;  // into SessionConfig::schema.operations
  std::string operation;            // identity, `VERB:path`
  Bindings path_values;
  Bindings query_values;
  Bindings header_values;
  std::optional<nlohmann::json> body;
  std::optional<std::string> auth_user;
  Intent intent = Intent::kValid;
  std::optional<ViolationRecord> violation;
  // Index of an earlier POST in the same test whose created id feeds
  // `chained_param`.
  std::optional<std::size_t> chained_from;
  std::string chained_param;

  friend bool operator==(const HttpAction&, const HttpAction&) = default;
};

struct TestCase {
  std::size_t id = 0;
  std::vector<HttpAction> actions;
  std::size_t first_exchange = 0;  // exchanges[first_exchange, +actions.size())

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct HttpExchange {
  std::size_t test_id = 0;
  std::size_t action_index = 0;
  HttpAction action;  // with chained values already substituted
  http::Request request;  // as sent, minus credentials
  bool credentials_applied = false;
  bool chained = false;  // a created id replaced `action.chained_param`
  std::optional<int> status;
  http::HeaderList response_headers;
  std::string response_body;
  std::optional<nlohmann::json> response_json;
  long elapsed_ms = 0;
  std::optional<std::string> transport_error;
  std::vector<Fault> faults;  // oracle firings on this exchange, before dedupe

  std::optional<std::string> response_header(std::string_view name) const;
};

struct SessionResult {
  std::vector<HttpExchange> exchanges;
  std::vector<TestCase> tests;
  std::vector<Fault> faults;  // deduplicated, first-occurrence order
  long wall_time_ms = 0;
  std::size_t calls_made = 0;
  std::size_t logins = 0;
  bool interrupted = false;
  std::vector<std::string> notes;
};

class TargetUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratedValue {
  nlohmann::json value;
  bool omitted = false;  // only for required-missing
  std::optional<std::string> violation;  // `.prop:constraint` when broken through an object property
};

/// Valid intent yields a conforming value. Invalid intent breaks exactly one
/// declared constraint, chosen uniformly; `required` adds omission as a
/// candidate. With no violable constraint the value stays valid and
/// `violation` is empty.
GeneratedValue generate_value(const openapi::ValueSchema& schema, Intent intent, Rng& rng, bool required = false);

/// A string matching `pattern`, for the literal/class/quantifier/group
/// subset of ECMAScript regexes. nullopt when the pattern is outside it.
std::optional<std::string> generate_from_pattern(const std::string& pattern, Rng& rng);

TestCase sample_test(const openapi::ApiSchema& schema, const std::vector<auth::AuthenticationInfo>& auth_entries,
                     Rng& rng, int max_actions, double invalid_probability = 0.2);

/// Renders a bound value the way it travels in a path, query or header.
std::string render_scalar(const nlohmann::json& value);

/// Builds the request for `action` without credentials.
http::Request build_request(const openapi::ApiOperation& op, const HttpAction& action, const http::Url& base_url);

/// Id of a created resource: last segment of `Location`, else a top-level
/// `id` field of a JSON body.
std::optional<std::string> created_id(const http::Response& response);

/// Runs random test cases until the budget elapses (the test in flight is
/// completed) or `stop` is raised (the HTTP call in flight is completed).
SessionResult run_session(const SessionConfig& config, http::Transport& transport,
                          const std::atomic<bool>* stop = nullptr);

}  // namespace wfc::engine
