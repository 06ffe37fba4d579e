// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/http.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <mutex>
#include <stdexcept>

#include <httplib.h>

namespace wfc::http {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

Url Url::parse(std::string_view text) {
  Url url;
  auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) throw std::invalid_argument("URL without scheme: " + std::string(text));
  url.scheme = lower(text.substr(0, scheme_end));
  if (url.scheme != "http" && url.scheme != "https") {
    throw std::invalid_argument("unsupported URL scheme: " + url.scheme);
  }
  url.port = url.scheme == "https" ? 443 : 80;

  auto rest = text.substr(scheme_end + 3);
  auto path_start = rest.find('/');
  auto authority = rest.substr(0, path_start);
  if (authority.empty()) throw std::invalid_argument("URL without host: " + std::string(text));

  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    auto port_text = authority.substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port <= 0 || port > 65535) {
      throw std::invalid_argument("bad port in URL: " + std::string(text));
    }
    url.port = port;
    authority = authority.substr(0, colon);
  }
  url.host = std::string(authority);

  if (path_start != std::string_view::npos) {
    std::string path(rest.substr(path_start));
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    if (path == "/") path.clear();
    url.path = path;
  }
  return url;
}

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

void Request::set_header(const std::string& name, const std::string& value) {
  std::erase_if(headers, [&](const auto& h) { return iequals(h.first, name); });
  headers.emplace_back(name, value);
}

std::optional<std::string> Request::header(std::string_view name) const {
  for (const auto& [k, v] : headers) {
    if (iequals(k, name)) return v;
  }
  return std::nullopt;
}

std::optional<std::string> Response::header(std::string_view name) const {
  for (const auto& [k, v] : headers) {
    if (iequals(k, name)) return v;
  }
  return std::nullopt;
}

std::vector<std::string> Response::header_values(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : headers) {
    if (iequals(k, name)) out.push_back(v);
  }
  return out;
}

struct HttplibTransport::Clients {
  std::mutex mutex;
  std::map<std::string, std::unique_ptr<httplib::Client>> by_origin;
};

HttplibTransport::HttplibTransport(std::chrono::milliseconds timeout)
    : timeout_(timeout), clients_(std::make_unique<Clients>()) {}

HttplibTransport::~HttplibTransport() = default;

Outcome HttplibTransport::send(const Request& request) {
  Outcome outcome;
  auto started = std::chrono::steady_clock::now();
  auto finish = [&] {
    outcome.elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    return outcome;
  };

  Url url;
  std::string target;
  try {
    url = Url::parse(request.url);
    auto rest = std::string_view(request.url).substr(request.url.find("://") + 3);
    auto slash = rest.find('/');
    target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  } catch (const std::invalid_argument& e) {
    outcome.error = e.what();
    return finish();
  }

  std::lock_guard lock(clients_->mutex);
  auto& client = clients_->by_origin[url.origin()];
  if (!client) {
    client = std::make_unique<httplib::Client>(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
    client->set_connection_timeout(seconds.count(), micros.count());
    client->set_read_timeout(seconds.count(), micros.count());
    client->set_write_timeout(seconds.count(), micros.count());
    client->set_keep_alive(true);
    client->set_tcp_nodelay(true);
    client->set_follow_location(false);
  }

  httplib::Request req;
  req.method = request.method;
  req.path = target;
  for (const auto& [k, v] : request.headers) req.headers.emplace(k, v);
  req.body = request.body;

  auto result = client->send(req);
  if (!result) {
    outcome.error = httplib::to_string(result.error());
    // A dropped keep-alive connection must not poison later calls.
    client.reset();
    return finish();
  }
  Response response;
  response.status = result->status;
  for (const auto& [k, v] : result->headers) response.headers.emplace_back(k, v);
  response.body = result->body;
  outcome.response = std::move(response);
  return finish();
}

std::map<std::string, std::string> parse_set_cookies(const std::vector<std::string>& set_cookie_values) {
  std::map<std::string, std::string> cookies;
  for (const auto& raw : set_cookie_values) {
    auto pair = std::string_view(raw).substr(0, raw.find(';'));
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) continue;
    auto name = trim(pair.substr(0, eq));
    if (name.empty()) continue;
    cookies[name] = trim(pair.substr(eq + 1));
  }
  return cookies;
}

std::string cookie_header(const std::map<std::string, std::string>& cookies) {
  std::string out;
  for (const auto& [name, value] : cookies) {
    if (!out.empty()) out += "; ";
    out += name + "=" + value;
  }
  return out;
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string media_type(std::string_view content_type) {
  return lower(trim(content_type.substr(0, content_type.find(';'))));
}

std::string_view reason_phrase(int status) {
  switch (status) {
    case 200: return "OK";
    case 201: return "Created";
    case 204: return "No Content";
    case 301: return "Moved Permanently";
    case 302: return "Found";
    case 303: return "See Other";
    case 307: return "Temporary Redirect";
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 409: return "Conflict";
    case 415: return "Unsupported Media Type";
    case 418: return "I'm a teapot";
    case 422: return "Unprocessable Entity";
    case 500: return "Internal Server Error";
    case 502: return "Bad Gateway";
    case 503: return "Service Unavailable";
    default: return "";
  }
}

}  // namespace wfc::http
