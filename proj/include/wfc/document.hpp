// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace wfc {

enum class DocumentFormat { kYaml, kJson };

/// The text is not well-formed in its declared format.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed document does not conform to its schema. `path()` locates
/// the offending node in `auth[1].name` notation (empty for the root).
class SchemaViolation : public std::runtime_error {
 public:
  SchemaViolation(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses YAML or JSON text into a JSON value. YAML plain scalars are resolved
/// with the YAML 1.2 core schema (null, booleans, integers, floats); quoted
/// scalars always stay strings. Mapping keys are always strings.
nlohmann::json parse_document(std::string_view text, DocumentFormat format);

/// Sniffs the format: text whose first non-blank character is `{` or `[` is
/// JSON, everything else is YAML.
DocumentFormat detect_format(std::string_view text);

inline nlohmann::json parse_document(std::string_view text) {
  return parse_document(text, detect_format(text));
}

/// Reads a whole file. Throws std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);

/// Appends `.name` or `[index]` to a diagnostic path.
std::string child_path(const std::string& parent, const std::string& key);
std::string child_path(const std::string& parent, std::size_t index);

}  // namespace wfc
