// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "wfc/resources.hpp"

namespace wfc::oracles {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string error_message(const std::string& body) {
  auto parsed = json::parse(body, nullptr, false);
  if (parsed.is_object()) {
    for (const char* key : {"message", "error", "detail", "title", "errorMessage"}) {
      auto it = parsed.find(key);
      if (it != parsed.end() && it->is_string()) return it->get<std::string>();
    }
    return {};
  }
  return body.substr(0, 256);
}

bool media_matches(const std::string& declared, const std::string& actual) {
  auto d = http::media_type(declared);
  if (d == actual || d == "*/*") return true;
  if (d.size() > 2 && d.compare(d.size() - 2, 2, "/*") == 0) return actual.rfind(d.substr(0, d.size() - 1), 0) == 0;
  return false;
}

bool is_json_media(const std::string& media) {
  return media.empty() || media.find("json") != std::string::npos;
}

}  // namespace

std::vector<FaultCategory> load_catalog(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CatalogError(std::string("catalog is not JSON: ") + e.what());
  }
  if (!doc.is_array()) throw CatalogError("catalog must be a JSON array");

  std::vector<FaultCategory> out;
  std::set<int> codes;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    std::string where = "catalog[" + std::to_string(i) + "]";
    if (!item.is_object()) throw CatalogError(where + " is not an object");
    for (const char* key : {"code", "name", "description", "source"}) {
      if (!item.contains(key)) throw CatalogError(where + " lacks '" + key + "'");
    }
    for (const auto& [key, value] : item.items()) {
      if (key != "code" && key != "name" && key != "description" && key != "source") {
        throw CatalogError(where + " has unknown field '" + key + "'");
      }
    }
    if (!item["code"].is_number_integer()) throw CatalogError(where + ".code must be an integer");
    if (!item["name"].is_string() || !item["description"].is_string() || !item["source"].is_string()) {
      throw CatalogError(where + ": name, description and source must be strings");
    }

    FaultCategory cat;
    cat.code = item["code"].get<int>();
    cat.name = item["name"].get<std::string>();
    cat.description = item["description"].get<std::string>();
    auto source = item["source"].get<std::string>();
    if (source == "wfc-defined") {
      cat.source = CategorySource::kWfcDefined;
    } else if (source == "experimental") {
      cat.source = CategorySource::kExperimental;
    } else {
      throw CatalogError(where + ".source must be 'wfc-defined' or 'experimental'");
    }
    bool reserved = cat.code >= 900 && cat.code <= 999;
    if (cat.source == CategorySource::kWfcDefined && reserved) {
      throw CatalogError(where + ": wfc-defined code " + std::to_string(cat.code) + " lies in the experimental range");
    }
    if (cat.source == CategorySource::kExperimental && !reserved) {
      throw CatalogError(where + ": experimental code " + std::to_string(cat.code) + " outside 900-999");
    }
    if (!codes.insert(cat.code).second) throw CatalogError("duplicate code " + std::to_string(cat.code));
    cat.detector_implemented =
        cat.code == kHttp500 || cat.code == kSchemaMismatch || cat.code == kInvalidInputAccepted;
    out.push_back(std::move(cat));
  }
  return out;
}

const std::vector<FaultCategory>& shipped_catalog() {
  static const std::vector<FaultCategory> catalog = load_catalog(resources::fault_catalog());
  return catalog;
}

const FaultCategory* find_category(int code) {
  for (const auto& c : shipped_catalog()) {
    if (c.code == code) return &c;
  }
  return nullptr;
}

std::string http_500_context(int status, const std::string& body) {
  static const std::regex kUuid("[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}");
  static const std::regex kDigits("[0-9]+");
  std::string message = std::regex_replace(error_message(body), kUuid, "<uuid>");
  message = std::regex_replace(message, kDigits, "#");
  std::string line = std::to_string(status) + " " + std::string(http::reason_phrase(status)) + "\n" + message;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(line)));
  return std::to_string(status) + "#" + hex;
}

std::optional<Fault> detect_http_500(const engine::HttpExchange& exchange) {
  if (!exchange.status || *exchange.status != 500) return std::nullopt;
  return Fault{kHttp500, exchange.action.operation, http_500_context(500, exchange.response_body)};
}

std::optional<Fault> detect_schema_mismatch(const engine::HttpExchange& exchange, const openapi::ApiOperation& op) {
  if (!exchange.status) return std::nullopt;
  int status = *exchange.status;
  auto fault = [&](std::string context) { return Fault{kSchemaMismatch, op.identity(), std::move(context)}; };

  const auto* spec = op.match_response(status);
  if (spec == nullptr) return fault("status " + std::to_string(status) + " not declared");
  if (exchange.response_body.empty()) return std::nullopt;

  std::string actual = http::media_type(exchange.response_header("Content-Type").value_or(""));
  if (!spec->media_types.empty() && !actual.empty() &&
      std::none_of(spec->media_types.begin(), spec->media_types.end(),
                   [&](const std::string& d) { return media_matches(d, actual); })) {
    return fault("content-type " + actual + " not declared");
  }
  if (!spec->schema || spec->schema->kind == openapi::ValueKind::kAny) return std::nullopt;
  if (!is_json_media(actual)) return std::nullopt;
  if (!exchange.response_json) return fault("body is not valid JSON");
  if (auto violation = openapi::first_violation(*exchange.response_json, *spec->schema)) return fault(*violation);
  return std::nullopt;
}

std::optional<Fault> detect_robustness_violation(const engine::HttpExchange& exchange) {
  if (exchange.action.intent != engine::Intent::kInvalid || !exchange.action.violation) return std::nullopt;
  if (!exchange.status || *exchange.status < 200 || *exchange.status > 299) return std::nullopt;
  return Fault{kInvalidInputAccepted, exchange.action.operation,
               exchange.action.violation->constraint + " violated: accepted"};
}

std::vector<Fault> evaluate(const engine::HttpExchange& exchange, const openapi::ApiOperation& op) {
  std::vector<Fault> out;
  if (auto f = detect_http_500(exchange)) out.push_back(std::move(*f));
  if (auto f = detect_schema_mismatch(exchange, op)) out.push_back(std::move(*f));
  if (auto f = detect_robustness_violation(exchange)) out.push_back(std::move(*f));
  return out;
}

std::vector<Fault> dedupe_faults(const std::vector<Fault>& faults) {
  std::vector<Fault> out;
  std::set<Fault> seen;
  for (const auto& f : faults) {
    if (seen.insert(f).second) out.push_back(f);
  }
  return out;
}

}  // namespace wfc::oracles
