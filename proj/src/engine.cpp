// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <thread>

#include "wfc/auth_flow.hpp"
#include "wfc/oracles.hpp"

namespace wfc::engine {

namespace {

using nlohmann::json;
using openapi::ValueKind;
using openapi::ValueSchema;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kWordChars = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string random_word(Rng& rng, std::size_t length) {
  std::string out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(kLetters[pick(rng, kLetters.size())]);
  return out;
}

bool matches(const std::string& text, const std::string& pattern) {
  try {
    return std::regex_search(text, std::regex(pattern));
  } catch (const std::regex_error&) {
    return true;  // unsupported syntax: nothing can be said
  }
}

// Recursive-descent generator over a regex subset. Each atom is parsed once to
// find its extent, then re-generated once per repetition.
class PatternGenerator {
 public:
  PatternGenerator(const std::string& pattern, Rng& rng) : p_(pattern), rng_(rng) {}

  std::optional<std::string> run() {
    std::string out = alternation();
    if (!ok_ || pos_ != p_.size()) return std::nullopt;
    return out;
  }

 private:
  std::string alternation() {
    std::vector<std::string> branches{sequence()};
    while (ok_ && pos_ < p_.size() && p_[pos_] == '|') {
      ++pos_;
      branches.push_back(sequence());
    }
    return branches[pick(rng_, branches.size())];
  }

  std::string sequence() {
    std::string out;
    while (ok_ && pos_ < p_.size() && p_[pos_] != '|' && p_[pos_] != ')') {
      std::size_t start = pos_;
      std::string first = atom();
      auto [lo, hi] = quantifier();
      std::size_t after = pos_;
      std::size_t count = lo + (hi > lo ? pick(rng_, hi - lo + 1) : 0);
      for (std::size_t i = 0; i < count; ++i) {
        if (i == 0) {
          out += first;
        } else {
          pos_ = start;
          out += atom();
        }
      }
      pos_ = after;
    }
    return out;
  }

  std::pair<std::size_t, std::size_t> quantifier() {
    if (pos_ >= p_.size()) return {1, 1};
    std::pair<std::size_t, std::size_t> q{1, 1};
    char c = p_[pos_];
    if (c == '*') {
      q = {0, 3};
      ++pos_;
    } else if (c == '+') {
      q = {1, 3};
      ++pos_;
    } else if (c == '?') {
      q = {0, 1};
      ++pos_;
    } else if (c == '{') {
      auto close = p_.find('}', pos_);
      if (close == std::string::npos) {
        ok_ = false;
        return q;
      }
      std::string body = p_.substr(pos_ + 1, close - pos_ - 1);
      static const std::regex kRange(R"((\d+)(,(\d*))?)");
      std::smatch m;
      if (!std::regex_match(body, m, kRange)) {
        ok_ = false;
        return q;
      }
      std::size_t lo = std::stoul(m[1].str());
      std::size_t hi = lo;
      if (m[2].matched) hi = m[3].str().empty() ? lo + 2 : std::stoul(m[3].str());
      if (hi < lo) ok_ = false;
      q = {lo, hi};
      pos_ = close + 1;
    } else {
      return q;
    }
    if (pos_ < p_.size() && p_[pos_] == '?') ++pos_;  // lazy marker
    return q;
  }

  std::string from_set(std::string_view set) { return std::string(1, set[pick(rng_, set.size())]); }

  std::string escape_class(char e) {
    switch (e) {
      case 'd': return from_set("0123456789");
      case 'w': return from_set(kWordChars);
      case 's': return " ";
      case 'D': return from_set(kLetters);
      case 'W': return "-";
      case 'S': return from_set(kLetters);
      default: return std::string(1, e);
    }
  }

  std::string atom() {
    char c = p_[pos_++];
    switch (c) {
      case '^':
      case '$':
        return {};
      case '.':
        return from_set(kLetters);
      case '\\':
        if (pos_ >= p_.size()) {
          ok_ = false;
          return {};
        }
        return escape_class(p_[pos_++]);
      case '(': {
        if (p_.compare(pos_, 2, "?:") == 0) pos_ += 2;
        std::string inner = alternation();
        if (pos_ >= p_.size() || p_[pos_] != ')') {
          ok_ = false;
          return {};
        }
        ++pos_;
        return inner;
      }
      case '[':
        return char_class();
      case '*':
      case '+':
      case '?':
      case '{':
        ok_ = false;
        return {};
      default:
        return std::string(1, c);
    }
  }

  std::string char_class() {
    bool negated = pos_ < p_.size() && p_[pos_] == '^';
    if (negated) ++pos_;
    std::string members;
    bool first = true;
    while (pos_ < p_.size() && (p_[pos_] != ']' || first)) {
      first = false;
      char c = p_[pos_++];
      if (c == '\\' && pos_ < p_.size()) {
        char e = p_[pos_++];
        if (e == 'd') {
          members += "0123456789";
        } else if (e == 'w') {
          members += kWordChars;
        } else if (e == 's') {
          members += ' ';
        } else {
          members += e;
        }
        continue;
      }
      if (pos_ + 1 < p_.size() && p_[pos_] == '-' && p_[pos_ + 1] != ']') {
        char end = p_[pos_ + 1];
        if (end == '\\') {
          ok_ = false;
          return {};
        }
        pos_ += 2;
        for (int x = static_cast<unsigned char>(c); x <= static_cast<unsigned char>(end); ++x) {
          members.push_back(static_cast<char>(x));
        }
        continue;
      }
      members.push_back(c);
    }
    if (pos_ >= p_.size()) {
      ok_ = false;
      return {};
    }
    ++pos_;  // ']'
    if (negated) {
      std::string complement;
      for (char x : kWordChars) {
        if (members.find(x) == std::string::npos) complement.push_back(x);
      }
      members = complement;
    }
    if (members.empty()) {
      ok_ = false;
      return {};
    }
    return from_set(members);
  }

  const std::string& p_;
  Rng& rng_;
  std::size_t pos_ = 0;
  bool ok_ = true;
};

std::string uuid_like(Rng& rng) {
  static constexpr std::string_view kHex = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 32; ++i) {
    if (i == 8 || i == 12 || i == 16 || i == 20) out.push_back('-');
    out.push_back(kHex[pick(rng, 16)]);
  }
  return out;
}

std::pair<double, double> numeric_bounds(const ValueSchema& s, bool integer) {
  double step = integer ? 1.0 : 0.01;
  double lo = 0;
  double hi = 0;
  bool has_lo = s.minimum.has_value();
  bool has_hi = s.maximum.has_value();
  if (has_lo) lo = (integer ? std::ceil(*s.minimum) : *s.minimum) + (s.exclusive_minimum ? step : 0.0);
  if (has_hi) hi = (integer ? std::floor(*s.maximum) : *s.maximum) - (s.exclusive_maximum ? step : 0.0);
  if (!has_lo && !has_hi) return {0, 100};
  if (!has_lo) lo = hi - 100;
  if (!has_hi) hi = lo + 100;
  return {lo, hi};
}

json valid_value(const ValueSchema& s, Rng& rng, int depth);

json valid_string(const ValueSchema& s, Rng& rng) {
  if (s.format == "date-time") return "2024-01-15T10:30:00Z";
  if (s.format == "date") return "2024-01-15";
  if (s.format == "uuid") return uuid_like(rng);
  if (s.format == "email") return random_word(rng, 6) + "@example.com";
  if (s.pattern) {
    if (auto generated = generate_from_pattern(*s.pattern, rng)) return *generated;
  }
  std::size_t lo = s.min_length.value_or(1);
  std::size_t hi = s.max_length.value_or(std::max<std::size_t>(lo, 8));
  if (hi < lo) hi = lo;
  lo = std::max<std::size_t>(lo, std::min<std::size_t>(hi, 1));
  return random_word(rng, lo + pick(rng, hi - lo + 1));
}

json valid_value(const ValueSchema& s, Rng& rng, int depth) {
  if (!s.enum_values.empty()) return s.enum_values[pick(rng, s.enum_values.size())];
  switch (s.kind) {
    case ValueKind::kString:
      return valid_string(s, rng);
    case ValueKind::kInteger: {
      auto [lo, hi] = numeric_bounds(s, true);
      if (hi < lo) return static_cast<long long>(lo);
      return std::uniform_int_distribution<long long>(static_cast<long long>(lo), static_cast<long long>(hi))(rng);
    }
    case ValueKind::kNumber: {
      auto [lo, hi] = numeric_bounds(s, false);
      if (hi < lo) return lo;
      double v = std::round(std::uniform_real_distribution<double>(lo, hi)(rng) * 100) / 100;
      return std::clamp(v, lo, hi);
    }
    case ValueKind::kBoolean:
      return coin(rng, 0.5);
    case ValueKind::kArray: {
      json arr = json::array();
      if (depth > 4 || !s.items) return arr;
      std::size_t n = 1 + pick(rng, 2);
      for (std::size_t i = 0; i < n; ++i) arr.push_back(valid_value(*s.items, rng, depth + 1));
      return arr;
    }
    case ValueKind::kObject: {
      json obj = json::object();
      if (depth > 4) return obj;
      for (const auto& prop : s.properties) {
        if (s.required.count(prop.name) != 0 || coin(rng, 0.5)) obj[prop.name] = valid_value(*prop.schema, rng, depth + 1);
      }
      return obj;
    }
    case ValueKind::kAny:
      return random_word(rng, 5);
  }
  return nullptr;
}

// Constraints of `s` itself that a generated value can break.
std::vector<std::string> violable(const ValueSchema& s, bool required) {
  std::vector<std::string> out;
  if (!s.enum_values.empty()) out.push_back("enum");
  if (s.kind == ValueKind::kInteger || s.kind == ValueKind::kNumber || s.kind == ValueKind::kBoolean ||
      s.kind == ValueKind::kArray || s.kind == ValueKind::kObject) {
    out.push_back("type");
  }
  if (s.kind == ValueKind::kInteger || s.kind == ValueKind::kNumber) {
    if (s.minimum) out.push_back("minimum");
    if (s.maximum) out.push_back("maximum");
  }
  if (s.kind == ValueKind::kString) {
    if (s.min_length && *s.min_length > 0) out.push_back("minLength");
    if (s.max_length) out.push_back("maxLength");
    if (s.pattern) out.push_back("pattern");
  }
  if (required) out.push_back("required-missing");
  return out;
}

// A value breaking `constraint`, or nullopt if none could be produced.
std::optional<json> break_constraint(const ValueSchema& s, const std::string& constraint, Rng& rng) {
  if (constraint == "enum") {
    if (s.kind == ValueKind::kInteger || s.kind == ValueKind::kNumber) {
      double top = 0;
      for (const auto& v : s.enum_values) {
        if (v.is_number()) top = std::max(top, v.get<double>());
      }
      return static_cast<long long>(top) + 1000;
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
      json candidate = "invalid_" + random_word(rng, 4);
      if (std::find(s.enum_values.begin(), s.enum_values.end(), candidate) == s.enum_values.end()) return candidate;
    }
    return std::nullopt;
  }
  if (constraint == "type") return "not-a-" + std::string(openapi::to_string(s.kind));
  if (constraint == "minimum") {
    double v = s.exclusive_minimum ? *s.minimum : *s.minimum - 1;
    if (s.kind == ValueKind::kInteger) return static_cast<long long>(std::floor(v));
    return v;
  }
  if (constraint == "maximum") {
    double v = s.exclusive_maximum ? *s.maximum : *s.maximum + 1;
    if (s.kind == ValueKind::kInteger) return static_cast<long long>(std::ceil(v));
    return v;
  }
  if (constraint == "minLength") return random_word(rng, *s.min_length - 1);
  if (constraint == "maxLength") return random_word(rng, *s.max_length + 1);
  if (constraint == "pattern") {
    for (std::string candidate : {"!", "~~~~", " ", "0", "a", "-_-"}) {
      if (!matches(candidate, *s.pattern)) return candidate;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::string path_placeholder_after(const std::string& path, std::size_t offset) {
  auto open = path.find('{', offset);
  if (open == std::string::npos) return {};
  auto close = path.find('}', open);
  if (close == std::string::npos) return {};
  return path.substr(open + 1, close - open - 1);
}

std::string form_encode(const json& body) {
  std::string out;
  if (!body.is_object()) return render_scalar(body);
  for (const auto& [k, v] : body.items()) {
    if (!out.empty()) out += "&";
    out += http::url_encode(k) + "=" + http::url_encode(render_scalar(v));
  }
  return out;
}

}  // namespace

std::string_view to_string(Intent intent) { return intent == Intent::kValid ? "valid" : "invalid"; }

void validate_config(const SessionConfig& config) {
  if (config.budget_seconds < 1) throw std::invalid_argument("budget_seconds must be >= 1");
  if (config.max_actions_per_test < 1) throw std::invalid_argument("max_actions_per_test must be >= 1");
  if (config.invalid_probability < 0 || config.invalid_probability > 1) {
    throw std::invalid_argument("invalid_probability must be in [0, 1]");
  }
  if (config.max_tests && *config.max_tests < 0) throw std::invalid_argument("max_tests must be >= 0");
}

std::optional<std::string> HttpExchange::response_header(std::string_view name) const {
  for (const auto& [k, v] : response_headers) {
    if (http::iequals(k, name)) return v;
  }
  return std::nullopt;
}

std::optional<std::string> generate_from_pattern(const std::string& pattern, Rng& rng) {
  auto out = PatternGenerator(pattern, rng).run();
  if (!out || !matches(*out, pattern)) return std::nullopt;
  return out;
}

GeneratedValue generate_value(const ValueSchema& schema, Intent intent, Rng& rng, bool required) {
  GeneratedValue out;
  if (intent == Intent::kInvalid) {
    auto candidates = violable(schema, required);
    // Objects can also be broken through one of their properties.
    std::vector<std::size_t> props;
    if (schema.kind == ValueKind::kObject) {
      for (std::size_t i = 0; i < schema.properties.size(); ++i) {
        const auto& p = schema.properties[i];
        if (!violable(*p.schema, schema.required.count(p.name) != 0).empty()) props.push_back(i);
      }
    }
    std::size_t total = candidates.size() + props.size();
    if (total > 0) {
      std::size_t choice = pick(rng, total);
      if (choice < candidates.size()) {
        const auto& constraint = candidates[choice];
        if (constraint == "required-missing") {
          out.omitted = true;
          out.violation = constraint;
          return out;
        }
        if (auto broken = break_constraint(schema, constraint, rng)) {
          out.value = *broken;
          out.violation = constraint;
          return out;
        }
      } else {
        const auto& prop = schema.properties[props[choice - candidates.size()]];
        out.value = valid_value(schema, rng, 0);
        auto inner = generate_value(*prop.schema, Intent::kInvalid, rng, schema.required.count(prop.name) != 0);
        if (inner.violation) {
          if (inner.omitted) {
            out.value.erase(prop.name);
          } else {
            out.value[prop.name] = inner.value;
          }
          out.violation = "." + prop.name + ":" + *inner.violation;
          return out;
        }
      }
    }
  }
  out.value = valid_value(schema, rng, 0);
  return out;
}

TestCase sample_test(const openapi::ApiSchema& schema, const std::vector<auth::AuthenticationInfo>& auth_entries,
                     Rng& rng, int max_actions, double invalid_probability) {
  TestCase tc;
  if (schema.operations.empty()) return tc;
  std::size_t n = 1 + pick(rng, static_cast<std::size_t>(std::max(1, max_actions)));
  for (std::size_t i = 0; i < n; ++i) {
    HttpAction action;
    action.operation_index = pick(rng, schema.operations.size());
    const auto& op = schema.operations[action.operation_index];
    action.operation = op.identity();
    action.intent = coin(rng, invalid_probability) ? Intent::kInvalid : Intent::kValid;
    if (op.security_required && !auth_entries.empty()) {
      std::size_t k = pick(rng, auth_entries.size() + 1);
      if (k < auth_entries.size()) action.auth_user = auth_entries[k].name.value_or("");
    }

    for (std::size_t j = tc.actions.size(); j-- > 0;) {
      const auto& prev = schema.operations[tc.actions[j].operation_index];
      if (prev.verb != "POST") continue;
      const auto prefix = prev.path_template + "/";
      if (op.path_template.rfind(prefix, 0) != 0) continue;
      auto param = path_placeholder_after(op.path_template, prefix.size());
      if (param.empty()) continue;
      action.chained_from = j;
      action.chained_param = param;
      break;
    }

    // Slots that may carry the single violation: parameters, then the body.
    std::vector<std::size_t> slots;
    if (action.intent == Intent::kInvalid) {
      for (std::size_t p = 0; p < op.parameters.size(); ++p) {
        const auto& param = op.parameters[p];
        if (action.chained_from && param.location == openapi::ParamLocation::kPath &&
            param.name == action.chained_param) {
          continue;
        }
        bool omittable = param.required && param.location != openapi::ParamLocation::kPath;
        if (!violable(param.schema, omittable).empty()) slots.push_back(p);
      }
      if (op.body) {
        bool body_violable = !violable(op.body->schema, op.body->required).empty();
        if (!body_violable && op.body->schema.kind == ValueKind::kObject) {
          for (const auto& prop : op.body->schema.properties) {
            if (!violable(*prop.schema, op.body->schema.required.count(prop.name) != 0).empty()) body_violable = true;
          }
        }
        if (body_violable) slots.push_back(op.parameters.size());
      }
      if (slots.empty()) action.intent = Intent::kValid;
    }
    std::optional<std::size_t> target;
    if (!slots.empty()) target = slots[pick(rng, slots.size())];

    for (std::size_t p = 0; p < op.parameters.size(); ++p) {
      const auto& param = op.parameters[p];
      Bindings* dest = param.location == openapi::ParamLocation::kPath    ? &action.path_values
                       : param.location == openapi::ParamLocation::kQuery ? &action.query_values
                                                                          : &action.header_values;
      if (target == p) {
        bool omittable = param.required && param.location != openapi::ParamLocation::kPath;
        auto gv = generate_value(param.schema, Intent::kInvalid, rng, omittable);
        if (gv.violation) {
          action.violation = ViolationRecord{*gv.violation,
                                             std::string(openapi::to_string(param.location)) + "." + param.name};
        } else {
          action.intent = Intent::kValid;
        }
        if (!gv.omitted) dest->emplace_back(param.name, gv.value);
        continue;
      }
      if (param.required || param.location == openapi::ParamLocation::kPath || coin(rng, 0.5)) {
        dest->emplace_back(param.name, generate_value(param.schema, Intent::kValid, rng).value);
      }
    }
    if (op.body) {
      if (target == op.parameters.size()) {
        auto gv = generate_value(op.body->schema, Intent::kInvalid, rng, op.body->required);
        std::string constraint = gv.violation.value_or("");
        std::string where = "body";
        if (!constraint.empty() && constraint.front() == '.') {
          auto colon = constraint.find(':');
          where += constraint.substr(0, colon);
          constraint = constraint.substr(colon + 1);
        }
        if (gv.violation) {
          action.violation = ViolationRecord{constraint, where};
        } else {
          action.intent = Intent::kValid;
        }
        if (!gv.omitted) action.body = gv.value;
      } else {
        action.body = generate_value(op.body->schema, Intent::kValid, rng).value;
      }
    }
    tc.actions.push_back(std::move(action));
  }
  return tc;
}

std::string render_scalar(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_null()) return {};
  if (value.is_array()) {
    std::string out;
    for (const auto& v : value) {
      if (!out.empty()) out += ",";
      out += render_scalar(v);
    }
    return out;
  }
  return value.dump();
}

http::Request build_request(const openapi::ApiOperation& op, const HttpAction& action, const http::Url& base_url) {
  http::Request req;
  req.method = op.verb;
  std::string path = op.path_template;
  for (const auto& [name, value] : action.path_values) {
    std::string token = "{" + name + "}";
    for (auto pos = path.find(token); pos != std::string::npos; pos = path.find(token)) {
      path.replace(pos, token.size(), http::url_encode(render_scalar(value)));
    }
  }
  req.url = base_url.to_string() + path;
  std::string query;
  for (const auto& [name, value] : action.query_values) {
    query += query.empty() ? "?" : "&";
    query += http::url_encode(name) + "=" + http::url_encode(render_scalar(value));
  }
  req.url += query;
  for (const auto& [name, value] : action.header_values) req.set_header(name, render_scalar(value));
  if (action.body && op.body) {
    const auto& media = op.body->media_type;
    req.set_header("Content-Type", media);
    req.body = media.find("x-www-form-urlencoded") != std::string::npos ? form_encode(*action.body)
                                                                        : action.body->dump();
  }
  return req;
}

std::optional<std::string> created_id(const http::Response& response) {
  if (auto location = response.header("Location")) {
    std::string loc = *location;
    while (!loc.empty() && loc.back() == '/') loc.pop_back();
    auto slash = loc.rfind('/');
    std::string last = slash == std::string::npos ? loc : loc.substr(slash + 1);
    if (!last.empty()) return last;
  }
  auto body = json::parse(response.body, nullptr, false);
  if (body.is_object()) {
    auto id = body.find("id");
    if (id != body.end() && (id->is_string() || id->is_number())) return render_scalar(*id);
  }
  return std::nullopt;
}

SessionResult run_session(const SessionConfig& config, http::Transport& transport, const std::atomic<bool>* stop) {
  validate_config(config);
  SessionResult result;
  const auto started = Clock::now();
  const auto deadline = started + std::chrono::seconds(config.budget_seconds);
  Rng rng(config.rng_seed);
  http::Url root = config.base_url;
  root.path.clear();

  std::map<std::string, const auth::AuthenticationInfo*> entries;
  for (const auto& e : config.auth_entries) entries[e.name.value_or("")] = &e;
  std::map<std::string, bool> had_non_401;
  auto last_request = Clock::time_point{};
  bool first_exchange = true;
  std::vector<Fault> firings;
  auto stopped = [&] { return stop != nullptr && stop->load(); };

  if (config.schema.operations.empty()) {
    result.notes.push_back("schema has no operations; nothing to fuzz");
  }

  while (!config.schema.operations.empty()) {
    if (stopped()) {
      result.interrupted = true;
      break;
    }
    if (Clock::now() >= deadline) break;
    if (config.max_tests && result.tests.size() >= static_cast<std::size_t>(*config.max_tests)) break;

    TestCase sampled = sample_test(config.schema, config.auth_entries, rng, config.max_actions_per_test,
                                   config.invalid_probability);
    TestCase tc;
    tc.id = result.tests.size();
    tc.first_exchange = result.exchanges.size();

    std::map<std::string, std::optional<auth::CredentialMaterial>> credentials;
    std::vector<std::optional<std::string>> created(sampled.actions.size());
    for (std::size_t i = 0; i < sampled.actions.size(); ++i) {
      if (stopped()) {
        result.interrupted = true;
        break;
      }
      HttpAction action = sampled.actions[i];
      const auto& op = config.schema.operations[action.operation_index];
      HttpExchange ex;
      if (action.chained_from && created[*action.chained_from]) {
        for (auto& [name, value] : action.path_values) {
          if (name == action.chained_param) {
            value = *created[*action.chained_from];
            ex.chained = true;
          }
        }
      }

      ex.test_id = tc.id;
      ex.action_index = i;
      ex.request = build_request(op, action, config.base_url);
      http::Request wire = ex.request;

      if (action.auth_user) {
        const auto& user = *action.auth_user;
        auto cached = credentials.find(user);
        if (cached == credentials.end()) {
          std::optional<auth::CredentialMaterial> material;
          auto entry = entries.find(user);
          if (entry != entries.end()) {
            try {
              if (entry->second->login_endpoint_auth) ++result.logins;
              material = auth::acquire_credentials(*entry->second, root, transport);
            } catch (const std::exception& e) {
              result.notes.push_back("login failed for user '" + user + "': " + e.what());
            }
          }
          cached = credentials.emplace(user, std::move(material)).first;
        }
        if (cached->second) {
          wire = auth::decorate_request(std::move(wire), *cached->second);
          ex.credentials_applied = true;
        }
      }

      if (config.min_request_delay.count() > 0) {
        auto wait_until = last_request + config.min_request_delay;
        if (Clock::now() < wait_until) std::this_thread::sleep_until(wait_until);
      }
      last_request = Clock::now();
      auto outcome = transport.send(wire);
      ex.elapsed_ms = static_cast<long>(outcome.elapsed.count());

      if (!outcome.ok() && first_exchange) {
        http::Request probe;
        probe.method = "GET";
        probe.url = root.to_string() + "/";
        if (!transport.send(probe).ok()) {
          throw TargetUnreachable("target unreachable at " + root.to_string() + ": " + outcome.error);
        }
      }
      first_exchange = false;

      if (outcome.ok()) {
        auto& response = *outcome.response;
        ex.status = response.status;
        ex.response_headers = response.headers;
        ex.response_body = response.body;
        auto parsed = json::parse(response.body, nullptr, false);
        if (!parsed.is_discarded()) ex.response_json = std::move(parsed);
        if (action.auth_user) {
          const auto& user = *action.auth_user;
          if (response.status == 401 && had_non_401[user]) {
            credentials.erase(user);  // re-acquired on the next call
          } else if (response.status != 401) {
            had_non_401[user] = true;
          }
        }
        if (op.verb == "POST" && response.status >= 200 && response.status < 300) created[i] = created_id(response);
      } else {
        ex.transport_error = outcome.error.empty() ? "transport error" : outcome.error;
      }

      ex.action = std::move(action);
      ex.faults = oracles::evaluate(ex, op);
      firings.insert(firings.end(), ex.faults.begin(), ex.faults.end());
      tc.actions.push_back(ex.action);
      result.exchanges.push_back(std::move(ex));
    }
    if (!tc.actions.empty()) result.tests.push_back(std::move(tc));
    if (result.interrupted) break;
  }

  if (result.interrupted) result.notes.push_back("session interrupted; results are partial");
  result.faults = oracles::dedupe_faults(firings);
  result.calls_made = result.exchanges.size();
  result.wall_time_ms = static_cast<long>(
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count());
  return result;
}

}  // namespace wfc::engine
