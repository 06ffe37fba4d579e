// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace wfc {

/// RFC 6901 JSON Pointer.
///
/// The empty pointer addresses the whole document. Every other pointer is a
/// sequence of `/`-prefixed reference tokens where `~0` and `~1` are the only
/// legal escapes.
class JsonPointer {
 public:
  JsonPointer() = default;

  /// Returns nullopt when `text` is not a syntactically valid pointer.
  static std::optional<JsonPointer> parse(std::string_view text);
  static bool is_valid(std::string_view text) { return parse(text).has_value(); }

  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Evaluates the pointer against `doc`. Returns nullptr when any step is
  /// missing: an absent member, an out-of-range or malformed array index, the
  /// `-` index, or a step through a scalar.
  const nlohmann::json* resolve(const nlohmann::json& doc) const;

  std::string to_string() const;

  friend bool operator==(const JsonPointer&, const JsonPointer&) = default;

 private:
  std::vector<std::string> tokens_;
};

}  // namespace wfc
