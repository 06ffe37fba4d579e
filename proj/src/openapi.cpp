// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/openapi.hpp"

#include <algorithm>
#include <regex>

#include "wfc/document.hpp"
#include "wfc/json_pointer.hpp"

namespace wfc::openapi {

namespace {

using nlohmann::json;

constexpr const char* kMethods[] = {"get", "put", "post", "delete", "options", "head", "patch", "trace"};

std::string pointer_child(const std::string& parent, const std::string& token) {
  std::string escaped;
  for (char c : token) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped.push_back(c);
    }
  }
  return parent + "/" + escaped;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::optional<double> number_field(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

std::optional<std::size_t> size_field(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number_unsigned()) return std::nullopt;
  return it->get<std::size_t>();
}

ValueKind kind_from_name(const std::string& name) {
  if (name == "string") return ValueKind::kString;
  if (name == "integer") return ValueKind::kInteger;
  if (name == "number") return ValueKind::kNumber;
  if (name == "boolean") return ValueKind::kBoolean;
  if (name == "array") return ValueKind::kArray;
  if (name == "object") return ValueKind::kObject;
  return ValueKind::kAny;
}

ValueKind kind_of_value(const json& v) {
  if (v.is_string()) return ValueKind::kString;
  if (v.is_number_integer()) return ValueKind::kInteger;
  if (v.is_number()) return ValueKind::kNumber;
  if (v.is_boolean()) return ValueKind::kBoolean;
  if (v.is_array()) return ValueKind::kArray;
  if (v.is_object()) return ValueKind::kObject;
  return ValueKind::kAny;
}

// Walks one document, collecting operations and issues.
class Ingestor {
 public:
  explicit Ingestor(const json& doc) : doc_(doc) {}

  ApiSchema run();

 private:
  void issue(SchemaIssue::Severity severity, std::string location, std::string message) {
    out_.issues.push_back({severity, std::move(location), std::move(message)});
  }

  // Follows a `$ref` chain. Returns nullptr (and records an issue) when the
  // target is missing, external, or cyclic.
  const json* follow(const json& node, const std::string& where);

  ValueSchema normalize(const json& node, const std::string& where);
  void parse_path_item(const std::string& path, const json& item, const std::string& where);
  ApiOperation parse_operation(const std::string& verb, const std::string& path, const json& op,
                               const std::vector<const json*>& shared_params, const std::string& where);
  std::optional<Parameter> parse_parameter(const json& node, const std::string& where, ApiOperation& op,
                                           std::vector<std::pair<std::string, const json*>>& form_fields);
  void parse_responses(const json& op, const std::string& where, ApiOperation& op_out);
  bool security_of(const json& op) const;
  std::vector<std::string> media_list(const json& op, const char* key) const;

  const json& doc_;
  ApiSchema out_;
  std::vector<std::string> ref_stack_;
};

const json* Ingestor::follow(const json& node, const std::string& where) {
  const json* current = &node;
  std::vector<std::string> seen;
  while (current->is_object() && current->contains("$ref")) {
    const auto& ref_value = (*current)["$ref"];
    if (!ref_value.is_string()) {
      issue(SchemaIssue::Severity::kDegraded, where, "$ref is not a string");
      return nullptr;
    }
    auto ref = ref_value.get<std::string>();
    if (ref.empty() || ref[0] != '#') {
      issue(SchemaIssue::Severity::kDegraded, where, "external $ref not supported: " + ref);
      return nullptr;
    }
    if (std::find(seen.begin(), seen.end(), ref) != seen.end()) {
      issue(SchemaIssue::Severity::kDegraded, where, "cyclic $ref chain: " + ref);
      return nullptr;
    }
    seen.push_back(ref);
    auto pointer = JsonPointer::parse(ref.substr(1));
    const json* target = pointer ? pointer->resolve(doc_) : nullptr;
    if (target == nullptr) {
      issue(SchemaIssue::Severity::kDegraded, where, "unresolvable $ref: " + ref);
      return nullptr;
    }
    current = target;
  }
  return current;
}

ValueSchema Ingestor::normalize(const json& node, const std::string& where) {
  ValueSchema s;
  if (node.is_boolean()) return s;
  if (!node.is_object()) {
    issue(SchemaIssue::Severity::kWarning, where, "schema is not an object; treated as any");
    return s;
  }

  if (auto ref = node.find("$ref"); ref != node.end() && ref->is_string()) {
    auto name = ref->get<std::string>();
    if (std::find(ref_stack_.begin(), ref_stack_.end(), name) != ref_stack_.end()) {
      issue(SchemaIssue::Severity::kDegraded, where, "recursive schema $ref degraded to any: " + name);
      return s;
    }
    const json* target = follow(node, where);
    if (target == nullptr) return s;
    ref_stack_.push_back(name);
    s = normalize(*target, name);
    ref_stack_.pop_back();
    return s;
  }

  if (auto all = node.find("allOf"); all != node.end() && all->is_array()) {
    s.kind = ValueKind::kAny;
    for (std::size_t i = 0; i < all->size(); ++i) {
      auto part = normalize((*all)[i], pointer_child(pointer_child(where, "allOf"), std::to_string(i)));
      if (part.kind == ValueKind::kObject || !part.properties.empty()) {
        s.kind = ValueKind::kObject;
        s.properties.insert(s.properties.end(), part.properties.begin(), part.properties.end());
        s.required.insert(part.required.begin(), part.required.end());
        s.additional_properties = s.additional_properties && part.additional_properties;
      } else if (s.kind == ValueKind::kAny) {
        s = part;
      }
    }
    return s;
  }
  for (const char* key : {"oneOf", "anyOf"}) {
    if (auto alt = node.find(key); alt != node.end() && alt->is_array() && !alt->empty()) {
      return normalize((*alt)[0], pointer_child(pointer_child(where, key), "0"));
    }
  }

  if (auto type = node.find("type"); type != node.end()) {
    if (type->is_string()) {
      s.kind = kind_from_name(type->get<std::string>());
    } else if (type->is_array()) {
      for (const auto& t : *type) {
        if (!t.is_string()) continue;
        if (t == "null") {
          s.nullable = true;
        } else if (s.kind == ValueKind::kAny) {
          s.kind = kind_from_name(t.get<std::string>());
        }
      }
    }
  } else if (node.contains("properties")) {
    s.kind = ValueKind::kObject;
  } else if (node.contains("items")) {
    s.kind = ValueKind::kArray;
  } else if (auto e = node.find("enum"); e != node.end() && e->is_array() && !e->empty()) {
    s.kind = kind_of_value((*e)[0]);
  }

  if (auto f = node.find("format"); f != node.end() && f->is_string()) s.format = f->get<std::string>();
  if (auto e = node.find("enum"); e != node.end() && e->is_array()) {
    for (const auto& v : *e) {
      if (v.is_null()) {
        s.nullable = true;
      } else {
        s.enum_values.push_back(v);
      }
    }
  }
  if (auto p = node.find("pattern"); p != node.end() && p->is_string()) s.pattern = p->get<std::string>();
  s.min_length = size_field(node, "minLength");
  s.max_length = size_field(node, "maxLength");
  s.minimum = number_field(node, "minimum");
  s.maximum = number_field(node, "maximum");
  if (auto em = node.find("exclusiveMinimum"); em != node.end()) {
    if (em->is_boolean()) {
      s.exclusive_minimum = em->get<bool>();
    } else if (em->is_number()) {
      s.minimum = em->get<double>();
      s.exclusive_minimum = true;
    }
  }
  if (auto em = node.find("exclusiveMaximum"); em != node.end()) {
    if (em->is_boolean()) {
      s.exclusive_maximum = em->get<bool>();
    } else if (em->is_number()) {
      s.maximum = em->get<double>();
      s.exclusive_maximum = true;
    }
  }
  if (auto n = node.find("nullable"); n != node.end() && n->is_boolean()) s.nullable = s.nullable || n->get<bool>();

  if (s.kind == ValueKind::kArray) {
    auto items = node.find("items");
    s.items = std::make_shared<ValueSchema>(items == node.end() ? ValueSchema{}
                                                                : normalize(*items, pointer_child(where, "items")));
  }
  if (s.kind == ValueKind::kObject) {
    if (auto props = node.find("properties"); props != node.end()) {
      if (props->is_object()) {
        for (const auto& [name, sub] : props->items()) {
          auto child = normalize(sub, pointer_child(pointer_child(where, "properties"), name));
          s.properties.push_back({name, std::make_shared<ValueSchema>(std::move(child))});
        }
      } else {
        issue(SchemaIssue::Severity::kWarning, pointer_child(where, "properties"), "properties is not an object");
      }
    }
    if (auto req = node.find("required"); req != node.end() && req->is_array()) {
      for (const auto& r : *req) {
        if (r.is_string()) s.required.insert(r.get<std::string>());
      }
    }
    if (auto add = node.find("additionalProperties"); add != node.end() && add->is_boolean()) {
      s.additional_properties = add->get<bool>();
    }
  }
  return s;
}

bool Ingestor::security_of(const json& op) const {
  auto has_requirement = [](const json& list) {
    if (!list.is_array()) return false;
    return std::any_of(list.begin(), list.end(), [](const json& r) { return r.is_object() && !r.empty(); });
  };
  if (auto sec = op.find("security"); sec != op.end()) return has_requirement(*sec);
  if (auto sec = doc_.find("security"); sec != doc_.end()) return has_requirement(*sec);
  return false;
}

std::vector<std::string> Ingestor::media_list(const json& op, const char* key) const {
  const json* list = nullptr;
  if (auto it = op.find(key); it != op.end()) {
    list = &*it;
  } else if (auto g = doc_.find(key); g != doc_.end()) {
    list = &*g;
  }
  std::vector<std::string> out;
  if (list != nullptr && list->is_array()) {
    for (const auto& m : *list) {
      if (m.is_string()) out.push_back(m.get<std::string>());
    }
  }
  return out;
}

std::optional<Parameter> Ingestor::parse_parameter(const json& raw, const std::string& where, ApiOperation& op,
                                                   std::vector<std::pair<std::string, const json*>>& form_fields) {
  const json* node = follow(raw, where);
  if (node == nullptr) return std::nullopt;
  if (!node->is_object() || !node->contains("name") || !node->contains("in") || !(*node)["name"].is_string() ||
      !(*node)["in"].is_string()) {
    issue(SchemaIssue::Severity::kWarning, where, "parameter without name/in skipped");
    return std::nullopt;
  }
  auto name = (*node)["name"].get<std::string>();
  auto in = (*node)["in"].get<std::string>();
  bool required = node->value("required", false) || in == "path";

  if (in == "body") {
    RequestBody body;
    auto consumes = media_list(*node, "consumes");
    body.media_type = consumes.empty() ? "application/json" : consumes.front();
    body.required = required;
    if (auto s = node->find("schema"); s != node->end()) body.schema = normalize(*s, pointer_child(where, "schema"));
    op.body = std::move(body);
    return std::nullopt;
  }
  if (in == "formData") {
    form_fields.emplace_back(name, node);
    return std::nullopt;
  }

  Parameter p;
  p.name = name;
  p.required = required;
  if (in == "path") {
    p.location = ParamLocation::kPath;
  } else if (in == "query") {
    p.location = ParamLocation::kQuery;
  } else if (in == "header") {
    p.location = ParamLocation::kHeader;
  } else {
    issue(SchemaIssue::Severity::kWarning, where, "parameter location '" + in + "' not supported; skipped");
    return std::nullopt;
  }

  if (auto s = node->find("schema"); s != node->end()) {
    p.schema = normalize(*s, pointer_child(where, "schema"));
  } else if (auto content = node->find("content"); content != node->end() && content->is_object() && !content->empty()) {
    auto first = content->begin();
    if (first->is_object() && first->contains("schema")) {
      p.schema = normalize((*first)["schema"], pointer_child(where, "content"));
    }
  } else {
    // v2 style: the type lives on the parameter itself.
    p.schema = normalize(*node, where);
  }
  return p;
}

void Ingestor::parse_responses(const json& op, const std::string& where, ApiOperation& out) {
  auto responses = op.find("responses");
  std::string rwhere = pointer_child(where, "responses");
  if (responses == op.end() || !responses->is_object()) {
    issue(SchemaIssue::Severity::kWarning, rwhere, "operation declares no responses");
    return;
  }
  auto produces = media_list(op, "produces");
  for (const auto& [code, raw] : responses->items()) {
    std::string cwhere = pointer_child(rwhere, code);
    ResponseSpec spec;
    const json* resp = follow(raw, cwhere);
    if (resp == nullptr) {
      // Keep the status declared; its body schema is unknown.
      spec.schema = ValueSchema{};
      out.declared_responses[upper(code) == "DEFAULT" ? "default" : upper(code)] = std::move(spec);
      continue;
    }
    if (auto content = resp->find("content"); content != resp->end() && content->is_object()) {
      const json* chosen = nullptr;
      for (const auto& [media, entry] : content->items()) {
        spec.media_types.push_back(media);
        if (chosen == nullptr && media.find("json") != std::string::npos) chosen = &entry;
      }
      if (chosen == nullptr && !content->empty()) chosen = &content->begin().value();
      if (chosen != nullptr && chosen->is_object() && chosen->contains("schema")) {
        spec.schema = normalize((*chosen)["schema"], pointer_child(cwhere, "content"));
      }
    } else if (auto s = resp->find("schema"); s != resp->end()) {
      spec.schema = normalize(*s, pointer_child(cwhere, "schema"));
      spec.media_types = produces.empty() ? std::vector<std::string>{"application/json"} : produces;
    }
    std::string key = upper(code) == "DEFAULT" ? "default" : upper(code);
    out.declared_responses[key] = std::move(spec);
  }
}

ApiOperation Ingestor::parse_operation(const std::string& verb, const std::string& path, const json& op,
                                       const std::vector<const json*>& shared_params, const std::string& where) {
  ApiOperation out;
  out.verb = upper(verb);
  out.path_template = path;
  out.security_required = security_of(op);

  std::vector<std::pair<std::string, const json*>> form_fields;
  std::vector<Parameter> params;
  auto add = [&](const json& raw, const std::string& pwhere) {
    auto p = parse_parameter(raw, pwhere, out, form_fields);
    if (!p) return;
    // Operation-level parameters override path-level ones with the same (name, in).
    std::erase_if(params, [&](const Parameter& q) { return q.name == p->name && q.location == p->location; });
    params.push_back(std::move(*p));
  };
  for (std::size_t i = 0; i < shared_params.size(); ++i) {
    add(*shared_params[i], pointer_child(pointer_child(where, ".."), std::to_string(i)));
  }
  if (auto list = op.find("parameters"); list != op.end()) {
    if (list->is_array()) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        add((*list)[i], pointer_child(pointer_child(where, "parameters"), std::to_string(i)));
      }
    } else {
      issue(SchemaIssue::Severity::kWarning, pointer_child(where, "parameters"), "parameters is not an array");
    }
  }
  out.parameters = std::move(params);

  if (!form_fields.empty()) {
    RequestBody body;
    auto consumes = media_list(op, "consumes");
    body.media_type = consumes.empty() ? "application/x-www-form-urlencoded" : consumes.front();
    body.schema.kind = ValueKind::kObject;
    for (const auto& [name, node] : form_fields) {
      auto child = normalize(*node, where);
      body.schema.properties.push_back({name, std::make_shared<ValueSchema>(std::move(child))});
      if (node->value("required", false)) {
        body.schema.required.insert(name);
        body.required = true;
      }
    }
    out.body = std::move(body);
  }

  if (auto rb = op.find("requestBody"); rb != op.end()) {
    std::string bwhere = pointer_child(where, "requestBody");
    const json* body = follow(*rb, bwhere);
    if (body != nullptr && body->is_object()) {
      RequestBody rbody;
      rbody.required = body->value("required", false);
      if (auto content = body->find("content"); content != body->end() && content->is_object() && !content->empty()) {
        const json* chosen = nullptr;
        std::string chosen_media;
        for (const auto& [media, entry] : content->items()) {
          if (media.find("json") != std::string::npos) {
            chosen = &entry;
            chosen_media = media;
            break;
          }
        }
        if (chosen == nullptr) {
          chosen = &content->begin().value();
          chosen_media = content->begin().key();
        }
        rbody.media_type = chosen_media;
        if (chosen->is_object() && chosen->contains("schema")) {
          rbody.schema = normalize((*chosen)["schema"], pointer_child(bwhere, "content"));
        }
        out.body = std::move(rbody);
      } else {
        issue(SchemaIssue::Severity::kWarning, bwhere, "requestBody without content ignored");
      }
    }
  }

  parse_responses(op, where, out);

  // Every {placeholder} needs a path parameter.
  static const std::regex kPlaceholder(R"(\{([^}/]+)\})");
  for (auto it = std::sregex_iterator(path.begin(), path.end(), kPlaceholder); it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    bool declared = std::any_of(out.parameters.begin(), out.parameters.end(), [&](const Parameter& p) {
      return p.location == ParamLocation::kPath && p.name == name;
    });
    if (!declared) {
      issue(SchemaIssue::Severity::kWarning, where,
            "path placeholder {" + name + "} has no parameter; synthesized a string parameter");
      Parameter p;
      p.name = name;
      p.location = ParamLocation::kPath;
      p.required = true;
      p.schema.kind = ValueKind::kString;
      out.parameters.push_back(std::move(p));
    }
  }
  return out;
}

void Ingestor::parse_path_item(const std::string& raw_path, const json& raw_item, const std::string& where) {
  std::string path = raw_path;
  if (path.empty() || path.front() != '/') {
    issue(SchemaIssue::Severity::kWarning, where, "path does not start with '/'; prefixed");
    path = "/" + path;
  }
  const json* item = follow(raw_item, where);
  if (item == nullptr) return;
  if (!item->is_object()) {
    issue(SchemaIssue::Severity::kWarning, where, "path item is not an object; skipped");
    return;
  }
  std::vector<const json*> shared;
  if (auto params = item->find("parameters"); params != item->end() && params->is_array()) {
    for (const auto& p : *params) shared.push_back(&p);
  }
  for (const char* method : kMethods) {
    auto op = item->find(method);
    if (op == item->end()) continue;
    std::string owhere = pointer_child(where, method);
    if (!op->is_object()) {
      issue(SchemaIssue::Severity::kWarning, owhere, "operation is not an object; skipped");
      continue;
    }
    try {
      out_.operations.push_back(parse_operation(method, path, *op, shared, owhere));
    } catch (const std::exception& e) {
      issue(SchemaIssue::Severity::kDegraded, owhere, std::string("operation skipped: ") + e.what());
    }
  }
}

ApiSchema Ingestor::run() {
  if (!doc_.is_object()) throw FatalSchemaError("document is not an object");
  bool v3 = doc_.contains("openapi");
  bool v2 = doc_.contains("swagger");
  if (v3 && v2) issue(SchemaIssue::Severity::kWarning, "", "both 'openapi' and 'swagger' present; treated as v3");
  if (!v3 && !v2) issue(SchemaIssue::Severity::kWarning, "", "no version marker; treated as v3");
  out_.spec_version = (v2 && !v3) ? SpecVersion::kV2 : SpecVersion::kV3;

  if (out_.spec_version == SpecVersion::kV2) {
    if (auto bp = doc_.find("basePath"); bp != doc_.end() && bp->is_string()) out_.raw_base = bp->get<std::string>();
  } else if (auto servers = doc_.find("servers"); servers != doc_.end() && servers->is_array() && !servers->empty()) {
    const auto& first = (*servers)[0];
    if (first.is_object() && first.contains("url") && first["url"].is_string()) {
      std::string url = first["url"].get<std::string>();
      // Server variables are replaced by their defaults.
      if (auto vars = first.find("variables"); vars != first.end() && vars->is_object()) {
        for (const auto& [name, var] : vars->items()) {
          if (!var.is_object() || !var.contains("default")) continue;
          std::string token = "{" + name + "}";
          std::string value = var["default"].is_string() ? var["default"].get<std::string>() : var["default"].dump();
          for (auto pos = url.find(token); pos != std::string::npos; pos = url.find(token)) url.replace(pos, token.size(), value);
        }
      }
      out_.raw_base = url;
    }
    if (servers->size() > 1) {
      issue(SchemaIssue::Severity::kWarning, "/servers", "multiple servers declared; using the first");
    }
  }

  auto paths = doc_.find("paths");
  if (paths == doc_.end() || !paths->is_object()) throw FatalSchemaError("document has no 'paths' object");
  for (const auto& [path, item] : paths->items()) parse_path_item(path, item, pointer_child("/paths", path));

  std::map<std::string, int> seen;
  for (auto& op : out_.operations) {
    int count = ++seen[op.identity()];
    if (count > 1) {
      issue(SchemaIssue::Severity::kWarning, pointer_child("/paths", op.path_template),
            "duplicate operation identity " + op.identity());
      op.identity_suffix = "#" + std::to_string(count);
    }
  }
  return std::move(out_);
}

std::optional<std::string> violation_at(const json& value, const ValueSchema& schema, const std::string& path) {
  auto where = path.empty() ? std::string("body") : path;
  if (value.is_null()) {
    if (schema.nullable || schema.kind == ValueKind::kAny) return std::nullopt;
    return where + " is null";
  }
  switch (schema.kind) {
    case ValueKind::kAny:
      return std::nullopt;
    case ValueKind::kString:
      if (!value.is_string()) return where + " expected string";
      break;
    case ValueKind::kInteger:
      if (!value.is_number_integer() &&
          !(value.is_number_float() && value.get<double>() == static_cast<double>(static_cast<long long>(value.get<double>())))) {
        return where + " expected integer";
      }
      break;
    case ValueKind::kNumber:
      if (!value.is_number()) return where + " expected number";
      break;
    case ValueKind::kBoolean:
      if (!value.is_boolean()) return where + " expected boolean";
      break;
    case ValueKind::kArray:
      if (!value.is_array()) return where + " expected array";
      break;
    case ValueKind::kObject:
      if (!value.is_object()) return where + " expected object";
      break;
  }

  if (!schema.enum_values.empty() &&
      std::find(schema.enum_values.begin(), schema.enum_values.end(), value) == schema.enum_values.end()) {
    return where + " not in enum";
  }
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (schema.min_length && s.size() < *schema.min_length) return where + " shorter than minLength";
    if (schema.max_length && s.size() > *schema.max_length) return where + " longer than maxLength";
    if (schema.pattern) {
      try {
        if (!std::regex_search(s, std::regex(*schema.pattern))) return where + " does not match pattern";
      } catch (const std::regex_error&) {
        // Patterns outside ECMAScript syntax are not checked.
      }
    }
  }
  if (value.is_number()) {
    double v = value.get<double>();
    if (schema.minimum && (schema.exclusive_minimum ? v <= *schema.minimum : v < *schema.minimum)) {
      return where + " below minimum";
    }
    if (schema.maximum && (schema.exclusive_maximum ? v >= *schema.maximum : v > *schema.maximum)) {
      return where + " above maximum";
    }
  }
  if (value.is_array() && schema.items) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (auto v = violation_at(value[i], *schema.items, path + "[" + std::to_string(i) + "]")) return v;
    }
  }
  if (value.is_object()) {
    for (const auto& name : schema.required) {
      if (!value.contains(name)) return path + "." + name + " missing";
    }
    for (const auto& [key, item] : value.items()) {
      const ValueSchema* sub = schema.property(key);
      if (sub != nullptr) {
        if (auto v = violation_at(item, *sub, path + "." + key)) return v;
      } else if (!schema.additional_properties) {
        return path + "." + key + " not allowed";
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kAny: return "any";
    case ValueKind::kString: return "string";
    case ValueKind::kInteger: return "integer";
    case ValueKind::kNumber: return "number";
    case ValueKind::kBoolean: return "boolean";
    case ValueKind::kArray: return "array";
    case ValueKind::kObject: return "object";
  }
  return "any";
}

std::string_view to_string(ParamLocation location) {
  switch (location) {
    case ParamLocation::kPath: return "path";
    case ParamLocation::kQuery: return "query";
    case ParamLocation::kHeader: return "header";
  }
  return "query";
}

const ValueSchema* ValueSchema::property(std::string_view name) const {
  for (const auto& p : properties) {
    if (p.name == name) return p.schema.get();
  }
  return nullptr;
}

const ResponseSpec* ApiOperation::match_response(int status) const {
  if (auto it = declared_responses.find(std::to_string(status)); it != declared_responses.end()) return &it->second;
  if (auto it = declared_responses.find(status_family(status)); it != declared_responses.end()) return &it->second;
  if (auto it = declared_responses.find("default"); it != declared_responses.end()) return &it->second;
  return nullptr;
}

const ApiOperation* ApiSchema::find(std::string_view identity) const {
  for (const auto& op : operations) {
    if (op.identity() == identity) return &op;
  }
  return nullptr;
}

ApiSchema load_schema(const nlohmann::json& document) { return Ingestor(document).run(); }

ApiSchema load_schema(std::string_view text) { return load_schema(parse_document(text)); }

std::string base_path_prefix(const ApiSchema& schema) {
  std::string prefix = schema.raw_base;
  if (schema.spec_version == SpecVersion::kV3) {
    auto scheme = prefix.find("://");
    if (scheme != std::string::npos) {
      auto slash = prefix.find('/', scheme + 3);
      prefix = slash == std::string::npos ? std::string() : prefix.substr(slash);
    }
  }
  if (auto q = prefix.find_first_of("?#"); q != std::string::npos) prefix.resize(q);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (!prefix.empty() && prefix.front() != '/') prefix = "/" + prefix;
  return prefix;
}

http::Url resolve_base_url(const ApiSchema& schema, const http::Url& override_origin) {
  http::Url url = override_origin;
  url.path = base_path_prefix(schema);
  return url;
}

std::optional<std::string> first_violation(const nlohmann::json& value, const ValueSchema& schema) {
  return violation_at(value, schema, "");
}

std::string status_family(int status) { return std::to_string(status / 100) + "XX"; }

}  // namespace wfc::openapi
