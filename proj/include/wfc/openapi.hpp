// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfc/http.hpp"

namespace wfc::openapi {

enum class ValueKind { kAny, kString, kInteger, kNumber, kBoolean, kArray, kObject };

std::string_view to_string(ValueKind kind);

struct ValueSchema;

struct Property {
  std::string name;
  std::shared_ptr<const ValueSchema> schema;
};

/// The normalized value vocabulary: enough to generate values and to check
/// responses, far short of full JSON Schema.
struct ValueSchema {
  ValueKind kind = ValueKind::kAny;
  std::string format;
  std::vector<nlohmann::json> enum_values;
  std::optional<std::string> pattern;
  std::optional<double> minimum;
  std::optional<double> maximum;
  bool exclusive_minimum = false;
  bool exclusive_maximum = false;
  std::optional<std::size_t> min_length;
  std::optional<std::size_t> max_length;
  bool nullable = false;

  std::shared_ptr<const ValueSchema> items;  // arrays
  std::vector<Property> properties;          // objects, document order
  std::set<std::string> required;
  bool additional_properties = true;

  const ValueSchema* property(std::string_view name) const;
};

enum class ParamLocation { kPath, kQuery, kHeader };

std::string_view to_string(ParamLocation location);

struct Parameter {
  std::string name;
  ParamLocation location = ParamLocation::kQuery;
  ValueSchema schema;
  bool required = false;
};

struct RequestBody {
  std::string media_type;
  ValueSchema schema;
  bool required = false;
};

struct ResponseSpec {
  std::vector<std::string> media_types;
  std::optional<ValueSchema> schema;  // absent when the response declares no body
};

struct ApiOperation {
  std::string verb;           // upper case
  std::string path_template;  // starts with '/'
  std::vector<Parameter> parameters;
  std::optional<RequestBody> body;
  std::map<std::string, ResponseSpec> declared_responses;  // "200", "2XX", "default"
  bool security_required = false;
  std::string identity_suffix;  // ordinal suffix added only on identity collisions

  /// `VERB:path`, e.g. `GET:/api/tags/{id}`.
  std::string identity() const { return verb + ":" + path_template + identity_suffix; }

  /// Exact code first, then its `NXX` family, then `default`.
  const ResponseSpec* match_response(int status) const;
};

enum class SpecVersion { kV2, kV3 };

struct SchemaIssue {
  enum class Severity { kWarning, kDegraded };
  Severity severity = Severity::kWarning;
  std::string location;  // JSON Pointer into the document
  std::string message;
};

struct ApiSchema {
  SpecVersion spec_version = SpecVersion::kV3;
  std::vector<ApiOperation> operations;
  std::vector<SchemaIssue> issues;
  std::string raw_base;  // v2 basePath or the first v3 servers[].url, as written

  const ApiOperation* find(std::string_view identity) const;
};

/// The document has no `paths` object, so nothing can be salvaged.
class FatalSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Leniently ingests an OpenAPI v2 or v3 document (JSON or YAML). Malformed
/// fragments become issues; unresolvable `$ref`s degrade to "any".
ApiSchema load_schema(std::string_view text);
ApiSchema load_schema(const nlohmann::json& document);

/// scheme://override_host:override_port + the schema's path prefix. The host
/// part of an absolute v3 server URL is discarded.
http::Url resolve_base_url(const ApiSchema& schema, const http::Url& override_origin);

/// Path prefix derived from raw_base: "" for absent or "/".
std::string base_path_prefix(const ApiSchema& schema);

/// First way `value` fails `schema`, e.g. ".id missing" or
/// ".items[0].price expected number". nullopt when it conforms.
std::optional<std::string> first_violation(const nlohmann::json& value, const ValueSchema& schema);

/// Family key (`2XX`) for a status code.
std::string status_family(int status);

}  // namespace wfc::openapi
