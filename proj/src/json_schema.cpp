// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/json_schema.hpp"

#include <regex>
#include <stdexcept>

#include "wfc/document.hpp"
#include "wfc/json_pointer.hpp"

namespace wfc {

namespace {

constexpr int kMaxRefDepth = 64;

bool has_type(const nlohmann::json& instance, const std::string& type) {
  if (type == "object") return instance.is_object();
  if (type == "array") return instance.is_array();
  if (type == "string") return instance.is_string();
  if (type == "boolean") return instance.is_boolean();
  if (type == "null") return instance.is_null();
  if (type == "number") return instance.is_number();
  if (type == "integer") {
    if (instance.is_number_integer()) return true;
    if (instance.is_number_float()) {
      double v = instance.get<double>();
      return v == static_cast<double>(static_cast<long long>(v));
    }
    return false;
  }
  return false;
}

}  // namespace

bool is_rfc3339_date_time(const std::string& text) {
  static const std::regex kDateTime(
      R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])[Tt]([01]\d|2[0-3]):[0-5]\d:([0-5]\d|60)(\.\d+)?([Zz]|[+-]([01]\d|2[0-3]):[0-5]\d))");
  return std::regex_match(text, kDateTime);
}

JsonSchemaValidator::JsonSchemaValidator(nlohmann::json schema) : root_(std::move(schema)) {}

std::vector<SchemaError> JsonSchemaValidator::validate(const nlohmann::json& instance) const {
  std::vector<SchemaError> errors;
  check(root_, instance, "", errors, 0);
  return errors;
}

const nlohmann::json& JsonSchemaValidator::deref(const std::string& ref) const {
  if (ref.empty() || ref[0] != '#') throw std::invalid_argument("only local $ref supported: " + ref);
  auto pointer = JsonPointer::parse(ref.substr(1));
  const nlohmann::json* target = pointer ? pointer->resolve(root_) : nullptr;
  if (target == nullptr) throw std::invalid_argument("unresolvable $ref: " + ref);
  return *target;
}

void JsonSchemaValidator::check(const nlohmann::json& schema, const nlohmann::json& instance,
                                const std::string& path, std::vector<SchemaError>& errors,
                                int depth) const {
  if (depth > kMaxRefDepth) {
    errors.push_back({path, "schema nesting too deep"});
    return;
  }
  if (schema.is_boolean()) {
    if (!schema.get<bool>()) errors.push_back({path, "no value allowed here"});
    return;
  }
  if (!schema.is_object()) return;

  if (auto ref = schema.find("$ref"); ref != schema.end()) {
    check(deref(ref->get<std::string>()), instance, path, errors, depth + 1);
  }

  if (auto type = schema.find("type"); type != schema.end()) {
    bool ok = false;
    if (type->is_string()) {
      ok = has_type(instance, type->get<std::string>());
    } else {
      for (const auto& t : *type) ok = ok || has_type(instance, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back({path, "expected type " + type->dump()});
      return;
    }
  }

  if (auto values = schema.find("enum"); values != schema.end()) {
    bool found = false;
    for (const auto& v : *values) found = found || v == instance;
    if (!found) errors.push_back({path, "value " + instance.dump() + " not in enum"});
  }
  if (auto c = schema.find("const"); c != schema.end() && *c != instance) {
    errors.push_back({path, "value must be " + c->dump()});
  }

  for (const char* key : {"allOf", "anyOf", "oneOf"}) {
    auto group = schema.find(key);
    if (group == schema.end()) continue;
    std::size_t passing = 0;
    std::vector<SchemaError> first_failure;
    for (const auto& sub : *group) {
      std::vector<SchemaError> sub_errors;
      check(sub, instance, path, sub_errors, depth + 1);
      if (sub_errors.empty()) {
        ++passing;
      } else if (first_failure.empty()) {
        first_failure = std::move(sub_errors);
      }
    }
    std::string k = key;
    if (k == "allOf" && passing != group->size()) {
      errors.insert(errors.end(), first_failure.begin(), first_failure.end());
    } else if (k == "anyOf" && passing == 0) {
      errors.push_back({path, "value matches none of anyOf"});
    } else if (k == "oneOf" && passing != 1) {
      errors.push_back({path, "value must match exactly one of oneOf"});
    }
  }

  if (instance.is_string()) {
    const auto& s = instance.get_ref<const std::string&>();
    if (auto min = schema.find("minLength"); min != schema.end() && s.size() < min->get<std::size_t>()) {
      errors.push_back({path, "string shorter than " + min->dump()});
    }
    if (auto format = schema.find("format");
        format != schema.end() && *format == "date-time" && !is_rfc3339_date_time(s)) {
      errors.push_back({path, "not an RFC 3339 date-time"});
    }
  }

  if (instance.is_number()) {
    double v = instance.get<double>();
    if (auto min = schema.find("minimum"); min != schema.end() && v < min->get<double>()) {
      errors.push_back({path, "value below minimum " + min->dump()});
    }
    if (auto max = schema.find("maximum"); max != schema.end() && v > max->get<double>()) {
      errors.push_back({path, "value above maximum " + max->dump()});
    }
  }

  if (instance.is_array()) {
    if (auto min = schema.find("minItems"); min != schema.end() && instance.size() < min->get<std::size_t>()) {
      errors.push_back({path, "array needs at least " + min->dump() + " item(s)"});
    }
    if (auto unique = schema.find("uniqueItems"); unique != schema.end() && unique->get<bool>()) {
      for (std::size_t i = 0; i < instance.size(); ++i) {
        for (std::size_t j = i + 1; j < instance.size(); ++j) {
          if (instance[i] == instance[j]) {
            errors.push_back({child_path(path, j), "duplicate array item"});
          }
        }
      }
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < instance.size(); ++i) {
        check(*items, instance[i], child_path(path, i), errors, depth + 1);
      }
    }
  }

  if (instance.is_object()) {
    if (auto required = schema.find("required"); required != schema.end()) {
      for (const auto& name : *required) {
        if (!instance.contains(name.get<std::string>())) {
          errors.push_back({child_path(path, name.get<std::string>()), "required field missing"});
        }
      }
    }
    auto properties = schema.find("properties");
    auto additional = schema.find("additionalProperties");
    for (const auto& [key, value] : instance.items()) {
      if (properties != schema.end() && properties->contains(key)) {
        check((*properties)[key], value, child_path(path, key), errors, depth + 1);
      } else if (additional != schema.end()) {
        if (additional->is_boolean() && !additional->get<bool>()) {
          errors.push_back({child_path(path, key), "unknown field"});
        } else {
          check(*additional, value, child_path(path, key), errors, depth + 1);
        }
      }
    }
  }
}

}  // namespace wfc
