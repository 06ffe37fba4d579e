// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfc/document.hpp"

namespace wfc::auth {

/// How a token is read from the login response and sent on later calls.
struct TokenHandling {
  std::optional<std::string> extract_from_field;  // JSON Pointer
  std::optional<std::string> http_header_name;
  std::optional<std::string> header_prefix;  // used verbatim, never trimmed

  friend bool operator==(const TokenHandling&, const TokenHandling&) = default;
};

struct LoginEndpointAuth {
  std::optional<std::string> endpoint;
  std::optional<std::string> verb;
  std::optional<std::string> content_type;
  std::optional<std::string> payload_raw;
  std::optional<bool> expect_cookies;
  std::optional<TokenHandling> token;

  bool cookies_expected() const { return expect_cookies.value_or(false); }

  friend bool operator==(const LoginEndpointAuth&, const LoginEndpointAuth&) = default;
};

struct Header {
  std::string name;
  std::string value;

  friend bool operator==(const Header&, const Header&) = default;
};

/// One user's credentials recipe. Every field is optional in the document;
/// after template resolution a valid entry has a name and exactly one
/// mechanism.
struct AuthenticationInfo {
  std::optional<std::string> name;
  std::optional<LoginEndpointAuth> login_endpoint_auth;
  std::optional<std::vector<Header>> static_headers;

  const std::string& user() const { return name.value(); }

  friend bool operator==(const AuthenticationInfo&, const AuthenticationInfo&) = default;
};

struct AuthFile {
  std::optional<std::string> schema_version;
  std::vector<AuthenticationInfo> auth;
  std::optional<AuthenticationInfo> auth_template;
  std::optional<std::map<std::string, std::string>> configs;

  friend bool operator==(const AuthFile&, const AuthFile&) = default;
};

/// A merged entry lacks a complete, unambiguous credential mechanism.
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ViolationCode {
  kEmptyAuthList,
  kMissingName,
  kDuplicateName,
  kNoMechanism,
  kMultipleMechanisms,
  kMissingEndpoint,
  kEndpointNotAbsolute,
  kMissingVerb,
  kMissingContentType,
  kNoCredentialSource,       // neither cookies nor token
  kConflictingCredentialSource,  // both cookies and token
  kMissingTokenField,
  kMissingTokenHeader,
  kInvalidJsonPointer,
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string path;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Parses the document exactly as written; the template is not applied.
/// Throws ParseError for malformed text and SchemaViolation for documents
/// that do not conform to the shipped auth schema (unknown fields included).
AuthFile parse_auth_file(std::string_view text, DocumentFormat format);
AuthFile parse_auth_file(std::string_view text);

/// Builds the structured file from an already-parsed JSON value.
AuthFile auth_file_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AuthFile& file);
std::string serialize_auth_file(const AuthFile& file, DocumentFormat format);

/// Entry-over-template merge, one level deep into the login recipe and its
/// token block. Throws ResolutionError when a merged entry has no complete
/// mechanism.
std::vector<AuthenticationInfo> resolve_template(const AuthFile& file);

/// All invariant violations of the resolved file; empty iff valid.
std::vector<Violation> validate_auth_file(const AuthFile& file);

/// Field-wise merge used by resolve_template, exposed for tests.
AuthenticationInfo merge_entry(const AuthenticationInfo& entry,
                               const std::optional<AuthenticationInfo>& auth_template);

}  // namespace wfc::auth
