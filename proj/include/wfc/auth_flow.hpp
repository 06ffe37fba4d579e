// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfc/auth_model.hpp"
#include "wfc/http.hpp"
#include "wfc/json_pointer.hpp"

namespace wfc::auth {

struct CookieCredential {
  std::map<std::string, std::string> cookies;  // never empty
  friend bool operator==(const CookieCredential&, const CookieCredential&) = default;
};

struct HeaderCredential {
  std::string name;
  std::string value;  // header prefix + token, verbatim
  friend bool operator==(const HeaderCredential&, const HeaderCredential&) = default;
};

struct StaticHeadersCredential {
  std::vector<Header> headers;
  friend bool operator==(const StaticHeadersCredential&, const StaticHeadersCredential&) = default;
};

/// Credentials for one user, ready to be attached to requests.
struct CredentialMaterial {
  std::string user_name;
  std::variant<CookieCredential, HeaderCredential, StaticHeadersCredential> kind;
  std::chrono::steady_clock::time_point acquired_at;
};

class AuthFlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The login request never got a response.
class LoginTransportError : public AuthFlowError {
 public:
  using AuthFlowError::AuthFlowError;
};

/// The login endpoint answered with a non-2xx status.
class LoginRejected : public AuthFlowError {
 public:
  LoginRejected(int status, const std::string& user)
      : AuthFlowError("login for '" + user + "' rejected with status " + std::to_string(status)),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class TokenNotFound : public AuthFlowError {
 public:
  using AuthFlowError::AuthFlowError;
};

class NonScalarToken : public AuthFlowError {
 public:
  using AuthFlowError::AuthFlowError;
};

/// The body is not JSON although a token must be extracted from it, or a
/// cookie login returned no cookies.
class MalformedLoginResponse : public AuthFlowError {
 public:
  using AuthFlowError::AuthFlowError;
};

inline constexpr int kMaxLoginRedirects = 3;

/// Runs the login recipe of a resolved entry against `base_url` (the root
/// the tested API is reachable at) and returns the captured credentials.
/// Static-header entries return immediately without network traffic.
/// Redirects are followed up to kMaxLoginRedirects hops; cookies set by any
/// hop are kept.
CredentialMaterial acquire_credentials(const AuthenticationInfo& entry, const http::Url& base_url,
                                       http::Transport& transport);

/// Reads the token at `pointer`. Strings are returned as-is; numbers and
/// booleans in canonical JSON text. Throws TokenNotFound for a missing or
/// null target and NonScalarToken for objects and arrays.
std::string extract_token(const nlohmann::json& body, const JsonPointer& pointer);

/// Attaches the credentials as headers: the token header or static headers
/// overwrite same-named headers, cookies become one `Cookie` header.
http::Request decorate_request(http::Request request, const CredentialMaterial& material);

}  // namespace wfc::auth
