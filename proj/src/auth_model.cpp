// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/auth_model.hpp"

#include <functional>
#include <set>

#include <yaml-cpp/yaml.h>

#include "wfc/json_pointer.hpp"
#include "wfc/json_schema.hpp"
#include "wfc/resources.hpp"

namespace wfc::auth {

namespace {

using nlohmann::json;

const JsonSchemaValidator& auth_validator() {
  static const JsonSchemaValidator validator(parse_document(resources::auth_schema(), DocumentFormat::kYaml));
  return validator;
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

TokenHandling token_from_json(const json& j) {
  TokenHandling t;
  read_optional(j, "extractFromField", t.extract_from_field);
  read_optional(j, "httpHeaderName", t.http_header_name);
  read_optional(j, "headerPrefix", t.header_prefix);
  return t;
}

LoginEndpointAuth login_from_json(const json& j) {
  LoginEndpointAuth l;
  read_optional(j, "endpoint", l.endpoint);
  read_optional(j, "verb", l.verb);
  read_optional(j, "contentType", l.content_type);
  read_optional(j, "payloadRaw", l.payload_raw);
  read_optional(j, "expectCookies", l.expect_cookies);
  if (auto it = j.find("token"); it != j.end()) l.token = token_from_json(*it);
  return l;
}

AuthenticationInfo info_from_json(const json& j) {
  AuthenticationInfo info;
  read_optional(j, "name", info.name);
  if (auto it = j.find("loginEndpointAuth"); it != j.end()) info.login_endpoint_auth = login_from_json(*it);
  if (auto it = j.find("fixedHeaders"); it != j.end()) {
    std::vector<Header> headers;
    for (const auto& h : *it) headers.push_back({h.at("name").get<std::string>(), h.at("value").get<std::string>()});
    info.static_headers = std::move(headers);
  }
  return info;
}

template <typename T>
void write_optional(json& obj, const char* key, const std::optional<T>& value) {
  if (value) obj[key] = *value;
}

json info_to_json(const AuthenticationInfo& info) {
  json j = json::object();
  write_optional(j, "name", info.name);
  if (const auto& l = info.login_endpoint_auth) {
    json lj = json::object();
    write_optional(lj, "endpoint", l->endpoint);
    write_optional(lj, "verb", l->verb);
    write_optional(lj, "contentType", l->content_type);
    write_optional(lj, "payloadRaw", l->payload_raw);
    write_optional(lj, "expectCookies", l->expect_cookies);
    if (const auto& t = l->token) {
      json tj = json::object();
      write_optional(tj, "extractFromField", t->extract_from_field);
      write_optional(tj, "httpHeaderName", t->http_header_name);
      write_optional(tj, "headerPrefix", t->header_prefix);
      lj["token"] = std::move(tj);
    }
    j["loginEndpointAuth"] = std::move(lj);
  }
  if (info.static_headers) {
    json hs = json::array();
    for (const auto& h : *info.static_headers) hs.push_back({{"name", h.name}, {"value", h.value}});
    j["fixedHeaders"] = std::move(hs);
  }
  return j;
}

template <typename T>
std::optional<T> pick(const std::optional<T>& entry, const std::optional<T>& fallback) {
  return entry ? entry : fallback;
}

// Checks one merged entry; `path` is the entry's document path.
void check_resolved(const AuthenticationInfo& info, const std::string& path, std::vector<Violation>& out) {
  if (!info.name || info.name->empty()) out.push_back({ViolationCode::kMissingName, child_path(path, "name")});

  bool has_login = info.login_endpoint_auth.has_value();
  bool has_static = info.static_headers.has_value();
  if (!has_login && !has_static) {
    out.push_back({ViolationCode::kNoMechanism, path});
    return;
  }
  if (has_login && has_static) {
    out.push_back({ViolationCode::kMultipleMechanisms, path});
    return;
  }
  if (has_static) return;

  const auto& login = *info.login_endpoint_auth;
  std::string lpath = child_path(path, "loginEndpointAuth");
  if (!login.endpoint) {
    out.push_back({ViolationCode::kMissingEndpoint, child_path(lpath, "endpoint")});
  } else if (login.endpoint->empty() || login.endpoint->front() != '/') {
    out.push_back({ViolationCode::kEndpointNotAbsolute, child_path(lpath, "endpoint")});
  }
  if (!login.verb) out.push_back({ViolationCode::kMissingVerb, child_path(lpath, "verb")});
  if (login.payload_raw && !login.content_type) {
    out.push_back({ViolationCode::kMissingContentType, child_path(lpath, "contentType")});
  }

  bool cookies = login.cookies_expected();
  bool token = login.token.has_value();
  if (cookies && token) {
    out.push_back({ViolationCode::kConflictingCredentialSource, lpath});
  } else if (!cookies && !token) {
    out.push_back({ViolationCode::kNoCredentialSource, lpath});
  }
  if (token) {
    std::string tpath = child_path(lpath, "token");
    const auto& t = *login.token;
    if (!t.extract_from_field) {
      out.push_back({ViolationCode::kMissingTokenField, child_path(tpath, "extractFromField")});
    } else if (!JsonPointer::is_valid(*t.extract_from_field) || t.extract_from_field->empty()) {
      out.push_back({ViolationCode::kInvalidJsonPointer, child_path(tpath, "extractFromField")});
    }
    if (!t.http_header_name || t.http_header_name->empty()) {
      out.push_back({ViolationCode::kMissingTokenHeader, child_path(tpath, "httpHeaderName")});
    }
  }
}

}  // namespace

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::kEmptyAuthList: return "EmptyAuthList";
    case ViolationCode::kMissingName: return "MissingName";
    case ViolationCode::kDuplicateName: return "DuplicateName";
    case ViolationCode::kNoMechanism: return "NoMechanism";
    case ViolationCode::kMultipleMechanisms: return "MultipleMechanisms";
    case ViolationCode::kMissingEndpoint: return "MissingEndpoint";
    case ViolationCode::kEndpointNotAbsolute: return "EndpointNotAbsolute";
    case ViolationCode::kMissingVerb: return "MissingVerb";
    case ViolationCode::kMissingContentType: return "MissingContentType";
    case ViolationCode::kNoCredentialSource: return "NoCredentialSource";
    case ViolationCode::kConflictingCredentialSource: return "ConflictingCredentialSource";
    case ViolationCode::kMissingTokenField: return "MissingTokenField";
    case ViolationCode::kMissingTokenHeader: return "MissingTokenHeader";
    case ViolationCode::kInvalidJsonPointer: return "InvalidJsonPointer";
  }
  return "Unknown";
}

AuthFile auth_file_from_json(const json& doc) {
  auto errors = auth_validator().validate(doc);
  if (!errors.empty()) throw SchemaViolation(errors.front().path, errors.front().message);

  AuthFile file;
  read_optional(doc, "schema_version", file.schema_version);
  for (const auto& entry : doc.at("auth")) file.auth.push_back(info_from_json(entry));
  if (auto it = doc.find("authTemplate"); it != doc.end()) file.auth_template = info_from_json(*it);
  if (auto it = doc.find("configs"); it != doc.end()) {
    file.configs = it->get<std::map<std::string, std::string>>();
  }
  return file;
}

AuthFile parse_auth_file(std::string_view text, DocumentFormat format) {
  return auth_file_from_json(parse_document(text, format));
}

AuthFile parse_auth_file(std::string_view text) { return parse_auth_file(text, detect_format(text)); }

json to_json(const AuthFile& file) {
  json j = json::object();
  write_optional(j, "schema_version", file.schema_version);
  json list = json::array();
  for (const auto& entry : file.auth) list.push_back(info_to_json(entry));
  j["auth"] = std::move(list);
  if (file.auth_template) j["authTemplate"] = info_to_json(*file.auth_template);
  if (file.configs) j["configs"] = *file.configs;
  return j;
}

std::string serialize_auth_file(const AuthFile& file, DocumentFormat format) {
  json j = to_json(file);
  if (format == DocumentFormat::kJson) return j.dump(2);
  // JSON is a YAML subset, but block style is what people edit by hand.
  YAML::Emitter out;
  std::function<void(const json&)> emit = [&](const json& v) {
    if (v.is_object()) {
      out << YAML::BeginMap;
      for (const auto& [k, item] : v.items()) {
        out << YAML::Key << k << YAML::Value;
        emit(item);
      }
      out << YAML::EndMap;
    } else if (v.is_array()) {
      out << YAML::BeginSeq;
      for (const auto& item : v) emit(item);
      out << YAML::EndSeq;
    } else if (v.is_boolean()) {
      out << v.get<bool>();
    } else {
      // Quoted so values never re-resolve as other scalar types.
      out << YAML::DoubleQuoted << v.get<std::string>();
    }
  };
  emit(j);
  return out.c_str();
}

AuthenticationInfo merge_entry(const AuthenticationInfo& entry,
                               const std::optional<AuthenticationInfo>& auth_template) {
  if (!auth_template) return entry;
  const auto& tmpl = *auth_template;

  AuthenticationInfo merged;
  merged.name = entry.name;  // the template never names a user
  merged.static_headers = pick(entry.static_headers, tmpl.static_headers);

  const auto& e = entry.login_endpoint_auth;
  const auto& t = tmpl.login_endpoint_auth;
  if (e && t) {
    LoginEndpointAuth l;
    l.endpoint = pick(e->endpoint, t->endpoint);
    l.verb = pick(e->verb, t->verb);
    l.content_type = pick(e->content_type, t->content_type);
    l.payload_raw = pick(e->payload_raw, t->payload_raw);
    l.expect_cookies = pick(e->expect_cookies, t->expect_cookies);
    if (e->token && t->token) {
      TokenHandling tok;
      tok.extract_from_field = pick(e->token->extract_from_field, t->token->extract_from_field);
      tok.http_header_name = pick(e->token->http_header_name, t->token->http_header_name);
      tok.header_prefix = pick(e->token->header_prefix, t->token->header_prefix);
      l.token = tok;
    } else {
      l.token = pick(e->token, t->token);
    }
    merged.login_endpoint_auth = l;
  } else {
    merged.login_endpoint_auth = pick(e, t);
  }
  return merged;
}

std::vector<AuthenticationInfo> resolve_template(const AuthFile& file) {
  std::vector<AuthenticationInfo> out;
  out.reserve(file.auth.size());
  for (std::size_t i = 0; i < file.auth.size(); ++i) {
    auto merged = merge_entry(file.auth[i], file.auth_template);
    std::vector<Violation> problems;
    std::string path = child_path("auth", i);
    check_resolved(merged, path, problems);
    if (!problems.empty()) {
      throw ResolutionError(problems.front().path, std::string(to_string(problems.front().code)));
    }
    out.push_back(std::move(merged));
  }
  return out;
}

std::vector<Violation> validate_auth_file(const AuthFile& file) {
  std::vector<Violation> out;
  if (file.auth.empty()) out.push_back({ViolationCode::kEmptyAuthList, "auth"});

  std::set<std::string> seen;
  for (std::size_t i = 0; i < file.auth.size(); ++i) {
    std::string path = child_path("auth", i);
    auto merged = merge_entry(file.auth[i], file.auth_template);
    check_resolved(merged, path, out);
    if (merged.name && !merged.name->empty() && !seen.insert(*merged.name).second) {
      out.push_back({ViolationCode::kDuplicateName, child_path(path, "name")});
    }
  }
  return out;
}

}  // namespace wfc::auth
