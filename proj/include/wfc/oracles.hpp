// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wfc/engine.hpp"
#include "wfc/fault.hpp"
#include "wfc/openapi.hpp"

namespace wfc::oracles {

inline constexpr int kHttp500 = 100;
inline constexpr int kSchemaMismatch = 101;
inline constexpr int kInvalidInputAccepted = 900;

enum class CategorySource { kWfcDefined, kExperimental };

struct FaultCategory {
  int code = 0;
  std::string name;
  std::string description;
  CategorySource source = CategorySource::kWfcDefined;
  bool detector_implemented = false;
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and checks a catalog: unique codes, experimental codes exactly in
/// [900, 999].
std::vector<FaultCategory> load_catalog(std::string_view json_text);

/// The catalog compiled into the binary.
const std::vector<FaultCategory>& shipped_catalog();
const FaultCategory* find_category(int code);

std::optional<Fault> detect_http_500(const engine::HttpExchange& exchange);
std::optional<Fault> detect_schema_mismatch(const engine::HttpExchange& exchange, const openapi::ApiOperation& op);
std::optional<Fault> detect_robustness_violation(const engine::HttpExchange& exchange);

/// Every detector, in code order.
std::vector<Fault> evaluate(const engine::HttpExchange& exchange, const openapi::ApiOperation& op);

/// First occurrences under (code, endpoint, context) equality, in order.
std::vector<Fault> dedupe_faults(const std::vector<Fault>& faults);

/// Replay-stable context for a 500: digest of the status and the body's
/// error message with digits and UUIDs masked.
std::string http_500_context(int status, const std::string& body);

}  // namespace wfc::oracles
