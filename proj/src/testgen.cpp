// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/testgen.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "wfc/json_pointer.hpp"
#include "wfc/json_schema.hpp"
#include "wfc/oracles.hpp"
#include "wfc/version.hpp"

namespace wfc::testgen {

namespace {

using nlohmann::json;
using Pair = std::pair<std::string, std::string>;

constexpr const char* kIdSentinel = "__WFC_CREATED_ID__";

bool replayable(const engine::SessionResult& session, const engine::TestCase& test) {
  if (test.first_exchange + test.actions.size() > session.exchanges.size()) return false;
  for (std::size_t i = 0; i < test.actions.size(); ++i) {
    if (!session.exchanges[test.first_exchange + i].status) return false;
  }
  return true;
}

std::string py_str(const std::string& s) { return json(s).dump(); }

std::string py_literal(const json& v) {
  if (v.is_string()) return py_str(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "True" : "False";
  if (v.is_null()) return "None";
  return v.dump();
}

std::string identifier(const std::string& text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "u_" + out;
  return out;
}

std::string slug(const std::string& verb, const std::string& path) {
  std::string s = identifier(verb) + "_on_" + identifier(path);
  if (s.size() > 60) s.resize(60);
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

std::string join_codes(const std::set<int>& codes, const std::string& sep) {
  std::string out;
  for (int c : codes) {
    if (!out.empty()) out += sep;
    out += std::to_string(c);
  }
  return out;
}

std::vector<std::string> words_of(const std::string& name) {
  std::vector<std::string> words;
  std::string current;
  for (std::size_t i = 0; i < name.size(); ++i) {
    unsigned char c = name[i];
    if (!std::isalnum(c)) {
      if (!current.empty()) words.push_back(current);
      current.clear();
      continue;
    }
    if (std::isupper(c) && !current.empty() && !std::isupper(static_cast<unsigned char>(name[i - 1]))) {
      words.push_back(current);
      current.clear();
    }
    current.push_back(static_cast<char>(std::tolower(c)));
  }
  if (!current.empty()) words.push_back(current);
  return words;
}

bool looks_like_date(const std::string& s) {
  if (is_rfc3339_date_time(s)) return true;
  return s.size() == 10 && std::isdigit(static_cast<unsigned char>(s[0])) && s[4] == '-' && s[7] == '-';
}

class Lines {
 public:
  void add(std::string line) { lines_.push_back(std::move(line)); }
  int next() const { return static_cast<int>(lines_.size()) + 1; }
  int last() const { return static_cast<int>(lines_.size()); }
  std::string text() const {
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
  }

 private:
  std::vector<std::string> lines_;
};

struct UserHelper {
  std::string function;
  const auth::AuthenticationInfo* entry = nullptr;
};

void emit_preamble(Lines& out, const std::string& default_base, const EmitOptions& options) {
  out.add(std::string("# Generated by ") + kToolName + " " + kToolVersion + " from a black-box fuzzing session.");
  out.add("# Point SUT_BASE_URL at the API root before running, e.g.");
  out.add("#   SUT_BASE_URL=" + default_base + " python -m pytest " + "<this file>");
  out.add("import functools");
  out.add("import json");
  out.add("import os");
  out.add("import signal");
  out.add("from urllib.parse import quote");
  out.add("");
  out.add("import requests");
  out.add("");
  out.add("BASE_URL = os.environ.get(\"SUT_BASE_URL\", " + py_str(default_base) + ").rstrip(\"/\")");
  out.add("REQUEST_TIMEOUT = " + std::to_string(options.request_timeout_seconds));
  out.add("");
  out.add("");
  out.add("def timeout(seconds):");
  out.add("    def decorator(func):");
  out.add("        @functools.wraps(func)");
  out.add("        def wrapper(*args, **kwargs):");
  out.add("            def on_alarm(signum, frame):");
  out.add("                raise TimeoutError(\"test exceeded %d seconds\" % seconds)");
  out.add("");
  out.add("            previous = signal.signal(signal.SIGALRM, on_alarm)");
  out.add("            signal.alarm(seconds)");
  out.add("            try:");
  out.add("                return func(*args, **kwargs)");
  out.add("            finally:");
  out.add("                signal.alarm(0)");
  out.add("                signal.signal(signal.SIGALRM, previous)");
  out.add("");
  out.add("        return wrapper");
  out.add("");
  out.add("    return decorator");
  out.add("");
  out.add("");
  out.add("def _scalar(value):");
  out.add("    return value if isinstance(value, str) else json.dumps(value)");
  out.add("");
  out.add("");
  out.add("def created_id(response):");
  out.add("    location = response.headers.get(\"Location\")");
  out.add("    if location:");
  out.add("        return location.rstrip(\"/\").rsplit(\"/\", 1)[-1]");
  out.add("    return _scalar(response.json()[\"id\"])");
}

void emit_login_helper(Lines& out, const UserHelper& helper) {
  const auto& entry = *helper.entry;
  out.add("");
  out.add("");
  out.add("def " + helper.function + "():");
  if (!entry.login_endpoint_auth) {
    std::string dict;
    for (const auto& h : entry.static_headers.value_or(std::vector<auth::Header>{})) {
      if (!dict.empty()) dict += ", ";
      dict += py_str(h.name) + ": " + py_str(h.value);
    }
    out.add("    return {" + dict + "}");
    return;
  }
  const auto& login = *entry.login_endpoint_auth;
  out.add("    session = requests.Session()");
  out.add("    response = session.request(");
  out.add("        " + py_str(login.verb.value_or("POST")) + ",");
  out.add("        BASE_URL + " + py_str(login.endpoint.value_or("")) + ",");
  if (login.content_type) out.add("        headers={\"Content-Type\": " + py_str(*login.content_type) + "},");
  if (login.payload_raw) out.add("        data=" + py_str(*login.payload_raw) + ",");
  out.add("        timeout=REQUEST_TIMEOUT,");
  out.add("    )");
  out.add("    assert 200 <= response.status_code < 300");
  if (login.cookies_expected()) {
    out.add("    cookies = session.cookies.get_dict()");
    out.add("    assert cookies");
    out.add("    return {\"Cookie\": \"; \".join(name + \"=\" + cookies[name] for name in sorted(cookies))}");
    return;
  }
  const auto& token = login.token.value();
  std::string access = "response.json()";
  if (auto pointer = JsonPointer::parse(token.extract_from_field.value_or(""))) {
    for (const auto& t : pointer->tokens()) {
      bool index = !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
      access += "[" + (index ? t : py_str(t)) + "]";
    }
  }
  out.add("    token = _scalar(" + access + ")");
  out.add("    return {" + py_str(token.http_header_name.value_or("Authorization")) + ": " +
          py_str(token.header_prefix.value_or("")) + " + token}");
}

// Python expression for the request URL, with the chained id spliced in.
std::string url_expression(const engine::HttpExchange& ex, const openapi::ApiOperation& op, const http::Url& base_url,
                           const std::string& origin) {
  auto strip = [&](const std::string& url) { return url.substr(std::min(origin.size(), url.size())); };
  if (!ex.chained) return "BASE_URL + " + py_str(strip(ex.request.url));
  engine::HttpAction marked = ex.action;
  for (auto& [name, value] : marked.path_values) {
    if (name == marked.chained_param) value = kIdSentinel;
  }
  std::string url = strip(engine::build_request(op, marked, base_url).url);
  auto at = url.find(kIdSentinel);
  std::string source = "response_" + std::to_string(*ex.action.chained_from);
  std::string expr = "BASE_URL + " + py_str(url.substr(0, at)) + " + quote(created_id(" + source + "), safe=\"\")";
  std::string rest = url.substr(at + std::string(kIdSentinel).size());
  if (!rest.empty()) expr += " + " + py_str(rest);
  return expr;
}

bool family_only(const engine::HttpExchange& ex, const openapi::ApiOperation& op) {
  bool mutating = op.verb == "PUT" || op.verb == "PATCH" || op.verb == "DELETE";
  bool has_path_param = std::any_of(op.parameters.begin(), op.parameters.end(), [](const openapi::Parameter& p) {
    return p.location == openapi::ParamLocation::kPath;
  });
  return mutating && has_path_param && !ex.chained && ex.faults.empty();
}

}  // namespace

std::vector<Fault> test_faults(const engine::SessionResult& session, const engine::TestCase& test) {
  std::vector<Fault> all;
  for (std::size_t i = 0; i < test.actions.size() && test.first_exchange + i < session.exchanges.size(); ++i) {
    const auto& f = session.exchanges[test.first_exchange + i].faults;
    all.insert(all.end(), f.begin(), f.end());
  }
  return oracles::dedupe_faults(all);
}

std::vector<Pair> test_pairs(const engine::SessionResult& session, const engine::TestCase& test) {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < test.actions.size() && test.first_exchange + i < session.exchanges.size(); ++i) {
    const auto& ex = session.exchanges[test.first_exchange + i];
    if (!ex.status) continue;
    Pair p{ex.action.operation, openapi::status_family(*ex.status)};
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

bool is_volatile_field(const std::string& name) {
  static const std::set<std::string> kDenied = {"timestamp", "date", "time", "id", "uuid", "token"};
  for (const auto& w : words_of(name)) {
    if (kDenied.count(w) != 0) return true;
  }
  std::string lower;
  for (unsigned char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  for (const auto& d : kDenied) {
    if (lower.size() > d.size() && lower.compare(lower.size() - d.size(), d.size(), d) == 0 && d != "date") {
      return true;  // e.g. `userid`, `accesstoken`
    }
  }
  return false;
}

SuiteSelection select_suite(const engine::SessionResult& session) {
  const auto& tests = session.tests;
  std::vector<std::vector<Fault>> faults(tests.size());
  std::vector<std::vector<Pair>> pairs(tests.size());
  std::vector<bool> candidate(tests.size(), false);
  std::map<Fault, std::size_t> best_for_fault;
  std::map<Pair, std::size_t> best_for_pair;
  std::vector<Pair> pair_order;

  auto better = [&](std::size_t a, std::size_t b) {
    if (tests[a].actions.size() != tests[b].actions.size()) return tests[a].actions.size() < tests[b].actions.size();
    return a < b;
  };
  for (std::size_t t = 0; t < tests.size(); ++t) {
    if (!replayable(session, tests[t])) continue;
    candidate[t] = true;
    faults[t] = test_faults(session, tests[t]);
    pairs[t] = test_pairs(session, tests[t]);
    for (const auto& f : faults[t]) {
      auto it = best_for_fault.find(f);
      if (it == best_for_fault.end() || better(t, it->second)) best_for_fault[f] = t;
    }
    for (const auto& p : pairs[t]) {
      auto it = best_for_pair.find(p);
      if (it == best_for_pair.end()) {
        pair_order.push_back(p);
        best_for_pair[p] = t;
      } else if (better(t, it->second)) {
        it->second = t;
      }
    }
  }

  std::vector<std::size_t> chosen;
  std::map<Fault, int> fault_cover;
  std::map<Pair, int> pair_cover;
  auto take = [&](std::size_t t) {
    chosen.push_back(t);
    for (const auto& f : faults[t]) ++fault_cover[f];
    for (const auto& p : pairs[t]) ++pair_cover[p];
  };
  for (const auto& f : session.faults) {
    auto it = best_for_fault.find(f);
    if (it != best_for_fault.end() && fault_cover[f] == 0) take(it->second);
  }
  for (const auto& p : pair_order) {
    if (pair_cover[p] == 0) take(best_for_pair[p]);
  }

  // Reverse prune: a test whose every witness is covered twice is redundant.
  for (std::size_t i = chosen.size(); i-- > 0;) {
    std::size_t t = chosen[i];
    bool redundant = std::all_of(faults[t].begin(), faults[t].end(), [&](const Fault& f) { return fault_cover[f] > 1; }) &&
                     std::all_of(pairs[t].begin(), pairs[t].end(), [&](const Pair& p) { return pair_cover[p] > 1; });
    if (!redundant) continue;
    for (const auto& f : faults[t]) --fault_cover[f];
    for (const auto& p : pairs[t]) --pair_cover[p];
    chosen.erase(chosen.begin() + static_cast<std::ptrdiff_t>(i));
  }

  std::sort(chosen.begin(), chosen.end());
  SuiteSelection out;
  for (std::size_t t : chosen) {
    out.selected.push_back(tests[t].id);
    out.reasons.push_back(faults[t].empty() ? SelectionReason::kCoverageNovel : SelectionReason::kFaultRevealing);
  }
  return out;
}

EmittedSuite emit_suite(const SuiteSelection& selection, const engine::SessionResult& session,
                        const openapi::ApiSchema& schema, const http::Url& base_url,
                        const std::vector<auth::AuthenticationInfo>& auth_entries, Dialect dialect,
                        const EmitOptions& options) {
  if (dialect != Dialect::kPythonPytest) throw EmitError("unsupported dialect");
  const std::string origin = base_url.origin();

  struct Planned {
    std::size_t ordinal;
    const engine::TestCase* test;
    std::vector<Fault> faults;
  };
  std::map<std::string, std::vector<Planned>> by_file;
  for (std::size_t k = 0; k < selection.selected.size(); ++k) {
    std::size_t id = selection.selected[k];
    auto it = std::find_if(session.tests.begin(), session.tests.end(),
                           [&](const engine::TestCase& t) { return t.id == id; });
    if (it == session.tests.end()) throw EmitError("selected test " + std::to_string(id) + " is not in the session");
    if (!replayable(session, *it)) throw EmitError("test " + std::to_string(id) + " lacks replay data");
    auto faults = test_faults(session, *it);
    std::set<int> codes;
    for (const auto& f : faults) codes.insert(f.code);
    std::string file = codes.empty() ? "test_coverage.py" : "test_faults_" + join_codes(codes, "_") + ".py";
    by_file[file].push_back({k, &*it, std::move(faults)});
  }

  std::vector<std::string> order;
  for (const auto& [file, planned] : by_file) {
    if (file != "test_coverage.py") order.push_back(file);
  }
  if (by_file.count("test_coverage.py") != 0) order.push_back("test_coverage.py");

  std::map<std::string, const auth::AuthenticationInfo*> entries;
  for (const auto& e : auth_entries) entries[e.name.value_or("")] = &e;

  EmittedSuite suite;
  for (const auto& file : order) {
    const auto& planned = by_file[file];
    Lines out;
    emit_preamble(out, origin, options);

    // One login helper per user whose credentials were applied in this file.
    std::map<std::string, UserHelper> helpers;
    std::set<std::string> used_names;
    for (const auto& p : planned) {
      for (std::size_t i = 0; i < p.test->actions.size(); ++i) {
        const auto& ex = session.exchanges[p.test->first_exchange + i];
        if (!ex.credentials_applied || !ex.action.auth_user) continue;
        const auto& user = *ex.action.auth_user;
        if (helpers.count(user) != 0) continue;
        auto entry = entries.find(user);
        if (entry == entries.end()) throw EmitError("no auth entry for user '" + user + "'");
        std::string fn = "login_" + identifier(user);
        while (!used_names.insert(fn).second) fn += "_";
        helpers[user] = UserHelper{fn, entry->second};
      }
    }
    for (const auto& [user, helper] : helpers) emit_login_helper(out, helper);

    for (const auto& p : planned) {
      const auto& test = *p.test;
      std::set<int> codes;
      for (const auto& f : p.faults) codes.insert(f.code);
      const auto& last = session.exchanges[test.first_exchange + test.actions.size() - 1];
      const auto& last_op = schema.operations.at(last.action.operation_index);
      std::string name = "test_" + std::to_string(p.ordinal) + "_" + slug(last_op.verb, last_op.path_template);
      if (!codes.empty()) name += "_shows_faults_" + join_codes(codes, "_");

      out.add("");
      out.add("");
      EmittedTest info;
      info.name = name;
      info.file = file;
      info.test_id = test.id;
      info.faults = p.faults;
      info.start_line = out.next();
      out.add("# Calls:");
      for (std::size_t i = 0; i < test.actions.size(); ++i) {
        const auto& ex = session.exchanges[test.first_exchange + i];
        out.add("# (" + std::to_string(*ex.status) + ") " + ex.action.operation);
        info.operations_called.push_back(ex.action.operation);
      }
      if (!p.faults.empty()) {
        bool many = p.faults.size() > 1;
        bool many_codes = codes.size() > 1;
        out.add("# Found " + std::to_string(p.faults.size()) + " potential fault" + (many ? "s" : "") +
                " of type-code" + (many_codes ? "s " : " ") + join_codes(codes, ", "));
      }
      out.add("@timeout(" + std::to_string(options.per_test_timeout_seconds) + ")");
      out.add("def " + name + "():");

      std::vector<std::string> logged_in;
      for (std::size_t i = 0; i < test.actions.size(); ++i) {
        const auto& ex = session.exchanges[test.first_exchange + i];
        if (!ex.credentials_applied || !ex.action.auth_user) continue;
        const auto& user = *ex.action.auth_user;
        if (std::find(logged_in.begin(), logged_in.end(), user) != logged_in.end()) continue;
        logged_in.push_back(user);
        out.add("    " + identifier(user) + "_headers = " + helpers[user].function + "()");
      }

      std::set<Fault> annotated;
      for (std::size_t i = 0; i < test.actions.size(); ++i) {
        const auto& ex = session.exchanges[test.first_exchange + i];
        const auto& op = schema.operations.at(ex.action.operation_index);
        const std::string var = "response_" + std::to_string(i);
        out.add("");
        for (const auto& f : ex.faults) {
          if (!annotated.insert(f).second) continue;
          const auto* cat = oracles::find_category(f.code);
          out.add("    # Fault" + std::to_string(f.code) + ". " + (cat ? cat->name : std::string("Unknown")) + ". " +
                  f.endpoint);
        }
        out.add("    " + var + " = requests.request(");
        out.add("        " + py_str(ex.request.method) + ",");
        out.add("        " + url_expression(ex, op, base_url, origin) + ",");
        std::string headers;
        for (const auto& [k, v] : ex.request.headers) {
          if (!headers.empty()) headers += ", ";
          headers += py_str(k) + ": " + py_str(v);
        }
        if (ex.credentials_applied && ex.action.auth_user) {
          if (!headers.empty()) headers += ", ";
          headers += "**" + identifier(*ex.action.auth_user) + "_headers";
        }
        if (!headers.empty()) out.add("        headers={" + headers + "},");
        if (!ex.request.body.empty()) out.add("        data=" + py_str(ex.request.body) + ",");
        out.add("        allow_redirects=False,");
        out.add("        timeout=REQUEST_TIMEOUT,");
        out.add("    )");

        int status = *ex.status;
        if (family_only(ex, op)) {
          int base = status / 100 * 100;
          out.add("    assert " + std::to_string(base) + " <= " + var + ".status_code < " + std::to_string(base + 100));
          continue;
        }
        out.add("    assert " + var + ".status_code == " + std::to_string(status));
        const auto* spec = op.match_response(status);
        auto content_type = ex.response_header("Content-Type");
        if (spec != nullptr && !spec->media_types.empty() && content_type) {
          auto media = http::media_type(*content_type);
          if (!media.empty()) {
            out.add("    assert " + var + ".headers.get(\"Content-Type\", \"\").startswith(" + py_str(media) + ")");
          }
        }
        if (ex.response_json && ex.response_json->is_object() && op.verb != "HEAD") {
          for (const auto& [key, value] : ex.response_json->items()) {
            if (value.is_object() || value.is_array() || is_volatile_field(key)) continue;
            if (value.is_string() && looks_like_date(value.get<std::string>())) continue;
            if (value.is_number_float()) {
              out.add("    assert abs(" + var + ".json()[" + py_str(key) + "] - " + value.dump() + ") < 1e-9");
              continue;
            }
            out.add("    assert " + var + ".json()[" + py_str(key) + "] == " + py_literal(value));
          }
        }
      }
      info.end_line = out.last();
      suite.tests.push_back(std::move(info));
    }
    suite.files.push_back({file, out.text()});
  }
  std::sort(suite.tests.begin(), suite.tests.end(),
            [](const EmittedTest& a, const EmittedTest& b) { return a.test_id < b.test_id; });
  return suite;
}

}  // namespace wfc::testgen
