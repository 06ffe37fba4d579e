// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wfc {

struct SchemaError {
  std::string path;  // `a.b[2].c` notation, empty for the root
  std::string message;

  friend bool operator==(const SchemaError&, const SchemaError&) = default;
};

/// Validator for the JSON-Schema subset used by the shipped WFC schemas.
///
/// Supported keywords: type, properties, required, additionalProperties,
/// items, minItems, uniqueItems, minLength, minimum, maximum, enum, const,
/// allOf, anyOf, oneOf, format (date-time), and local `#/$defs/...` refs.
/// Annotation keywords ($schema, $id, title, description) are ignored.
class JsonSchemaValidator {
 public:
  explicit JsonSchemaValidator(nlohmann::json schema);

  std::vector<SchemaError> validate(const nlohmann::json& instance) const;

 private:
  void check(const nlohmann::json& schema, const nlohmann::json& instance, const std::string& path,
             std::vector<SchemaError>& errors, int depth) const;
  const nlohmann::json& deref(const std::string& ref) const;

  nlohmann::json root_;
};

/// True when `text` is an RFC 3339 date-time, e.g. `2025-07-01T10:00:00Z`.
bool is_rfc3339_date_time(const std::string& text);

}  // namespace wfc
