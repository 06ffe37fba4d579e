// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/json_pointer.hpp"

#include <charconv>

namespace wfc {

namespace {

std::optional<std::size_t> parse_array_index(const std::string& token) {
  if (token.empty() || (token.size() > 1 && token[0] == '0')) return std::nullopt;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

}  // namespace

std::optional<JsonPointer> JsonPointer::parse(std::string_view text) {
  JsonPointer pointer;
  if (text.empty()) return pointer;
  if (text.front() != '/') return std::nullopt;

  std::string current;
  for (std::size_t i = 1; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '/') {
      pointer.tokens_.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (text[i] == '~') {
      if (i + 1 >= text.size()) return std::nullopt;
      char next = text[i + 1];
      if (next == '0') {
        current.push_back('~');
      } else if (next == '1') {
        current.push_back('/');
      } else {
        return std::nullopt;
      }
      ++i;
      continue;
    }
    current.push_back(text[i]);
  }
  return pointer;
}

const nlohmann::json* JsonPointer::resolve(const nlohmann::json& doc) const {
  const nlohmann::json* node = &doc;
  for (const auto& token : tokens_) {
    if (node->is_object()) {
      auto it = node->find(token);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      auto index = parse_array_index(token);
      if (!index || *index >= node->size()) return nullptr;
      node = &(*node)[*index];
    } else {
      return nullptr;
    }
  }
  return node;
}

std::string JsonPointer::to_string() const {
  std::string out;
  for (const auto& token : tokens_) {
    out.push_back('/');
    for (char c : token) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace wfc
