// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wfc::http {

/// `scheme://host:port/path`. The path never ends with `/` unless it is
/// exactly `/`; an absent path is stored as empty.
struct Url {
  std::string scheme = "http";
  std::string host;
  int port = 80;
  std::string path;

  /// Throws std::invalid_argument for anything that is not an absolute
  /// http(s) URL.
  static Url parse(std::string_view text);

  std::string origin() const;  // scheme://host:port
  std::string to_string() const { return origin() + path; }

  friend bool operator==(const Url&, const Url&) = default;
};

using HeaderList = std::vector<std::pair<std::string, std::string>>;

bool iequals(std::string_view a, std::string_view b);

struct Request {
  std::string method;
  std::string url;  // absolute, including the query string
  HeaderList headers;
  std::string body;

  /// Replaces every header with this name (case-insensitive), then appends.
  void set_header(const std::string& name, const std::string& value);
  std::optional<std::string> header(std::string_view name) const;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Response {
  int status = 0;
  HeaderList headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
  std::vector<std::string> header_values(std::string_view name) const;

  friend bool operator==(const Response&, const Response&) = default;
};

/// Either a response or a transport-level failure (connection refused,
/// timeout), never both.
struct Outcome {
  std::optional<Response> response;
  std::string error;
  std::chrono::milliseconds elapsed{0};

  bool ok() const { return response.has_value(); }
};

/// Blocking request/response capability. Implementations never follow
/// redirects on their own.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Outcome send(const Request& request) = 0;
};

/// Transport backed by cpp-httplib, one keep-alive connection per origin.
class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~HttplibTransport() override;

  Outcome send(const Request& request) override;

 private:
  struct Clients;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<Clients> clients_;
};

/// Parses `Set-Cookie` values into name/value pairs, ignoring attributes.
std::map<std::string, std::string> parse_set_cookies(const std::vector<std::string>& set_cookie_values);

/// `a=1; b=2` form for the Cookie request header.
std::string cookie_header(const std::map<std::string, std::string>& cookies);

/// Percent-encodes a query or path component (RFC 3986 unreserved kept).
std::string url_encode(std::string_view text);

/// The part of a Content-Type value before any `;` parameters, lowercased.
std::string media_type(std::string_view content_type);

std::string_view reason_phrase(int status);

}  // namespace wfc::http
