// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/auth_flow.hpp"

namespace wfc::auth {

namespace {

std::string resolve_location(const std::string& location, const http::Url& base) {
  if (location.rfind("http://", 0) == 0 || location.rfind("https://", 0) == 0) return location;
  if (!location.empty() && location.front() == '/') return base.origin() + location;
  return base.to_string() + "/" + location;
}

}  // namespace

std::string extract_token(const nlohmann::json& body, const JsonPointer& pointer) {
  const nlohmann::json* target = pointer.resolve(body);
  if (target == nullptr || target->is_null()) {
    throw TokenNotFound("no token at '" + pointer.to_string() + "'");
  }
  if (target->is_object() || target->is_array()) {
    throw NonScalarToken("value at '" + pointer.to_string() + "' is not a scalar");
  }
  if (target->is_string()) return target->get<std::string>();
  return target->dump();
}

CredentialMaterial acquire_credentials(const AuthenticationInfo& entry, const http::Url& base_url,
                                       http::Transport& transport) {
  CredentialMaterial material;
  material.user_name = entry.name.value_or("");

  if (entry.static_headers && !entry.login_endpoint_auth) {
    material.kind = StaticHeadersCredential{*entry.static_headers};
    material.acquired_at = std::chrono::steady_clock::now();
    return material;
  }
  if (!entry.login_endpoint_auth) throw std::invalid_argument("entry has no credential mechanism");
  const auto& login = *entry.login_endpoint_auth;

  http::Request request;
  request.method = login.verb.value_or("POST");
  request.url = base_url.to_string() + login.endpoint.value_or("");
  if (login.content_type) request.set_header("Content-Type", *login.content_type);
  request.body = login.payload_raw.value_or("");

  std::map<std::string, std::string> cookies;
  http::Response response;
  for (int hop = 0;; ++hop) {
    auto outcome = transport.send(request);
    if (!outcome.ok()) {
      throw LoginTransportError("login for '" + material.user_name + "' failed: " + outcome.error);
    }
    response = std::move(*outcome.response);
    for (auto& [k, v] : http::parse_set_cookies(response.header_values("Set-Cookie"))) cookies[k] = v;

    bool redirect = response.status >= 300 && response.status < 400 && response.header("Location");
    if (!redirect || hop == kMaxLoginRedirects) break;
    request.url = resolve_location(*response.header("Location"), base_url);
    if (response.status != 307 && response.status != 308) {
      request.method = "GET";
      request.body.clear();
      std::erase_if(request.headers, [](const auto& h) { return http::iequals(h.first, "Content-Type"); });
    }
    if (!cookies.empty()) request.set_header("Cookie", http::cookie_header(cookies));
  }

  if (response.status < 200 || response.status > 299) throw LoginRejected(response.status, material.user_name);

  if (login.cookies_expected()) {
    if (cookies.empty()) {
      throw MalformedLoginResponse("login for '" + material.user_name + "' returned no cookies");
    }
    material.kind = CookieCredential{std::move(cookies)};
  } else {
    const auto& token = login.token.value();
    auto pointer = JsonPointer::parse(token.extract_from_field.value_or(""));
    if (!pointer) throw std::invalid_argument("invalid JSON pointer in token handling");
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::parse_error&) {
      throw MalformedLoginResponse("login response for '" + material.user_name + "' is not JSON");
    }
    auto value = extract_token(body, *pointer);
    material.kind = HeaderCredential{token.http_header_name.value_or("Authorization"),
                                     token.header_prefix.value_or("") + value};
  }
  material.acquired_at = std::chrono::steady_clock::now();
  return material;
}

http::Request decorate_request(http::Request request, const CredentialMaterial& material) {
  std::visit(
      [&](const auto& kind) {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, HeaderCredential>) {
          request.set_header(kind.name, kind.value);
        } else if constexpr (std::is_same_v<T, CookieCredential>) {
          request.set_header("Cookie", http::cookie_header(kind.cookies));
        } else {
          for (const auto& h : kind.headers) request.set_header(h.name, h.value);
        }
      },
      material.kind);
  return request;
}

}  // namespace wfc::auth
