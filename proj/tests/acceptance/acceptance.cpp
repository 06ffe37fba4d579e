// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

// Prints one [PASS]/[FAIL] line per acceptance criterion; exits 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "testbed.hpp"
#include "wfc/app.hpp"
#include "wfc/auth_model.hpp"
#include "wfc/engine.hpp"
#include "wfc/openapi.hpp"
#include "wfc/report.hpp"
#include "wfc/stats.hpp"
#include "wfc/testgen.hpp"
#include "wfc/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wfc;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

long ms_since(Clock::time_point start) {
  return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

stats::Table fixture(const std::string& name) {
  return stats::parse_table_csv(read_file(fs::path(WFC_SOURCE_DIR) / "fixtures/paper-tables" / name),
                                stats::Direction::kHigherBetter);
}

engine::SessionConfig testbed_config(const testbed::Testbed& tb, const std::string& auth_yaml, std::uint64_t seed) {
  engine::SessionConfig config;
  config.schema = openapi::load_schema(std::string_view(testbed::openapi_v3_document()));
  config.base_url = openapi::resolve_base_url(config.schema, http::Url::parse(tb.origin()));
  if (!auth_yaml.empty()) config.auth_entries = auth::resolve_template(auth::parse_auth_file(auth_yaml));
  config.rng_seed = seed;
  return config;
}

// Session shared by criteria 6 and 8.
struct E2E {
  engine::SessionConfig config;
  engine::SessionResult session;
  testgen::EmittedSuite suite;
  report::Report report;
  long runtime_ms = 0;
};

const E2E& e2e() {
  static const E2E run = [] {
    E2E out;
    testbed::Testbed tb;
    tb.start();
    out.config = testbed_config(tb, testbed::token_auth_yaml(), 20261019);
    out.config.budget_seconds = 10;
    http::HttplibTransport transport;
    auto start = Clock::now();
    out.session = engine::run_session(out.config, transport);
    out.runtime_ms = ms_since(start);
    auto selection = testgen::select_suite(out.session);
    out.suite = testgen::emit_suite(selection, out.session, out.config.schema, out.config.base_url,
                                    out.config.auth_entries);
    out.report = report::build_report(out.session, out.config.schema, out.suite, {kToolName, kToolVersion, {}});
    return out;
  }();
  return run;
}

Verdict criterion1() {
  struct Case {
    const char* file;
    double expected;
  };
  std::string detail;
  bool ok = true;
  for (auto c : {Case{"table4_2xx.csv", 90.170}, Case{"table5_500.csv", 35.344}, Case{"table6_jacoco.csv", 121.150}}) {
    auto table = fixture(c.file);
    auto r = stats::friedman(*table.ranks);
    ok = ok && std::fabs(r.chi2 - c.expected) <= 1.0 && r.p < 0.001;
    detail += std::string(detail.empty() ? "" : "; ") + c.file + " chi2=" + fmt("%.3f", r.chi2) + " p=" +
              fmt("%.2e", r.p);
  }
  return {ok, detail};
}

Verdict criterion2() {
  auto table = fixture("table6_jacoco.csv");
  auto summary = stats::summarize(table.values);
  struct Want {
    const char* label;
    double mean;
    double median;
  };
  bool ok = true;
  std::string detail;
  for (auto w : {Want{"EvoMaster", 45.5, 46.5}, Want{"Schemathesis", 25.9, 23.1}}) {
    auto it = std::find_if(summary.begin(), summary.end(), [&](const auto& s) { return s.label == w.label; });
    if (it == summary.end()) return {false, std::string("no column ") + w.label};
    bool mean_ok = std::fabs(it->mean - w.mean) <= 0.05;
    bool median_ok = std::fabs(it->median - w.median) <= 0.05;
    ok = ok && mean_ok && median_ok;
    detail += std::string(detail.empty() ? "" : "; ") + w.label + " mean=" + fmt("%.4f", it->mean) +
              (mean_ok ? "" : " (want " + fmt("%.1f", w.mean) + ")") + " median=" + fmt("%.4f", it->median) +
              (median_ok ? "" : " (want " + fmt("%.1f", w.median) + ")");
  }
  return {ok, detail};
}

Verdict criterion3() {
  auto table = fixture("table4_2xx.csv");
  auto computed = stats::rank_rows(table.values);
  bool ok = true;
  std::string detail;
  for (std::string row : {"bibliothek", "pay-publicapi", "rest-scs"}) {
    auto it = std::find(table.values.rows.begin(), table.values.rows.end(), row);
    if (it == table.values.rows.end()) return {false, "missing row " + row};
    auto i = static_cast<std::size_t>(it - table.values.rows.begin());
    bool same = computed.ranks[i] == table.ranks->ranks[i];
    ok = ok && same;
    detail += std::string(detail.empty() ? "" : ", ") + row + (same ? " exact" : " differs");
  }
  return {ok, detail};
}

Verdict criterion4() {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(50 + i * 1.5);
    ys.push_back(10 + i * 2.0);
  }
  double a = stats::a12(xs, ys);
  double p = stats::mann_whitney_p(xs, ys);
  return {a == 1.0 && p < 0.001, "A=" + fmt("%.2f", a) + " p=" + fmt("%.2e", p)};
}

Verdict criterion5() {
  auto check = [](const std::string& yaml, const std::vector<std::string>& users, bool cookies) -> std::string {
    auto file = auth::parse_auth_file(yaml);
    if (!auth::validate_auth_file(file).empty()) return "validation failed";
    auto entries = auth::resolve_template(file);
    if (entries.size() != 2) return "expected 2 users";
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& e = entries[i];
      if (e.name != users[i]) return "name " + std::to_string(i);
      if (e.static_headers) return "unexpected fixedHeaders";
      const auto& login = e.login_endpoint_auth.value();
      if (login.verb != "POST") return "verb";
      if (cookies) {
        if (login.endpoint != "/login" || login.content_type != "application/x-www-form-urlencoded") return "login";
        if (login.expect_cookies != true || login.token) return "cookie mechanism";
      } else {
        if (login.endpoint != "/api/auth/signin" || login.content_type != "application/json") return "login";
        if (login.cookies_expected() || !login.token) return "token mechanism";
        if (login.token->extract_from_field != "/accessToken") return "extractFromField";
        if (login.token->http_header_name != "Authorization") return "httpHeaderName";
        if (login.token->header_prefix != "Bearer ") return "headerPrefix";
      }
    }
    if (cookies && entries[0].login_endpoint_auth->payload_raw != "username=admin&password=admin") return "payloadRaw";
    if (!cookies && entries[1].login_endpoint_auth->payload_raw !=
                        std::string(R"({"usernameOrEmail": "user", "password": "bar123"})")) {
      return "payloadRaw";
    }
    for (auto format : {DocumentFormat::kYaml, DocumentFormat::kJson}) {
      if (auth::parse_auth_file(auth::serialize_auth_file(file, format), format) != file) return "round trip";
    }
    return {};
  };
  auto cookie = check(testbed::cookie_auth_yaml(), {"ADMIN", "user1"}, true);
  auto token = check(testbed::token_auth_yaml(), {"admin", "user"}, false);
  bool ok = cookie.empty() && token.empty();
  return {ok, ok ? "cookie file and token file match field by field, YAML/JSON round trips hold"
                 : "cookie: " + (cookie.empty() ? "ok" : cookie) + ", token: " + (token.empty() ? "ok" : token)};
}

Verdict criterion6() {
  const auto& run = e2e();
  const auto& s = run.session;
  std::set<int> with_token;
  std::set<int> without;
  std::size_t raw_500 = 0;
  for (const auto& ex : s.exchanges) {
    if (!ex.status) continue;
    if (ex.action.operation == "GET:/items") (ex.credentials_applied ? with_token : without).insert(*ex.status);
    if (ex.action.operation == "GET:/tags/{id}" && *ex.status == 500) ++raw_500;
  }
  bool gate = std::any_of(with_token.begin(), with_token.end(), [](int v) { return v >= 200 && v < 300; }) &&
              without == std::set<int>{401};
  auto count = [&](int code, const std::string& op) {
    return std::count_if(s.faults.begin(), s.faults.end(),
                         [&](const Fault& f) { return f.code == code && (op.empty() || f.endpoint == op); });
  };
  bool faults = count(100, "GET:/tags/{id}") == 1 && count(101, "GET:/teapot") >= 1 &&
                count(900, "GET:/pets/findByStatus") >= 1;
  bool dedupe = raw_500 > 1 && std::set<Fault>(s.faults.begin(), s.faults.end()).size() == s.faults.size();
  bool fast = run.runtime_ms < 30000;
  return {gate && faults && dedupe && fast,
          std::string("(a) ") + (gate ? "ok" : "fail") + " (b) " + (faults ? "ok" : "fail") + " (c) " +
              (dedupe ? "ok" : "fail") + ": " + std::to_string(raw_500) + " raw 500s -> " +
              std::to_string(count(100, "")) + " code-100 fault; " + std::to_string(s.calls_made) + " calls in " +
              std::to_string(run.runtime_ms) + " ms"};
}

Verdict criterion7() {
  auto dir = fs::temp_directory_path() / "wfc-acceptance-replay";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto schema_path = dir / "openapi.json";
  auto auth_path = dir / "auth.yaml";
  std::ofstream(schema_path) << testbed::openapi_v3_document();
  std::ofstream(auth_path) << testbed::token_auth_yaml();

  cli::CliConfig config;
  config.schema_path = schema_path.string();
  config.auth_path = auth_path.string();
  config.duration_seconds = 5;
  config.seed = 7;
  config.output_dir = (dir / "out").string();
  config.emit_viewer = false;
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    testbed::Testbed tb;
    tb.start();
    config.base_url = tb.origin();
    code = cli::run(config, out, err);
  }
  if (code != cli::kExitOk && code != cli::kExitSchemaIssues) return {false, "fuzzing exited " + std::to_string(code)};

  auto rep = report::parse_report(read_file(dir / "out/report.json"));
  std::set<int> annotated;
  for (const auto& t : rep.test_cases) {
    std::vector<std::string> lines;
    std::istringstream in(read_file(dir / "out" / t.file));
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    std::string body;
    for (int l = t.start_line; l <= t.end_line; ++l) body += lines.at(static_cast<std::size_t>(l - 1)) + "\n";
    for (const auto& f : t.fault_refs) {
      annotated.insert(f.code);
      if (body.find("# Fault" + std::to_string(f.code) + ".") == std::string::npos) {
        return {false, t.name + " lacks the annotation for fault " + std::to_string(f.code)};
      }
      if (f.code == 100 && body.find("status_code == 500") == std::string::npos) {
        return {false, t.name + " does not assert the 500"};
      }
    }
  }

  testbed::Testbed fresh;
  fresh.start();
  auto log = dir / "pytest.log";
  std::string cmd = "cd '" + (dir / "out").string() + "' && SUT_BASE_URL=" + fresh.origin() + " '" + WFC_PYTHON +
                    "' -m pytest -q -p no:cacheprovider . > '" + log.string() + "' 2>&1";
  auto start = Clock::now();
  int status = std::system(cmd.c_str());
  long elapsed = ms_since(start);
  std::string tail = read_file(log);
  auto last = tail.find_last_not_of('\n');
  tail = tail.substr(0, last + 1);
  tail = tail.substr(tail.find_last_of('\n') + 1);
  bool covers = annotated.count(100) && annotated.count(101) && annotated.count(900);
  bool ok = status == 0 && elapsed < 60000 && covers;
  if (!ok) std::cerr << read_file(log);
  return {ok, std::to_string(rep.total_tests) + " emitted tests against a fresh testbed: " + tail + " in " +
                  std::to_string(elapsed) + " ms" + (covers ? "" : "; missing a fault family")};
}

Verdict criterion8() {
  const auto& run = e2e();
  auto doc = report::to_json(run.report);
  auto errors = report::validate_report_json(doc);
  if (!errors.empty()) return {false, "schema: " + errors.front().path + " " + errors.front().message};
  auto text = report::serialize_report(run.report);
  auto parsed = report::parse_report(text);
  if (parsed != run.report || report::serialize_report(parsed) != text) return {false, "serialize/parse differ"};

  std::size_t defs = 0;
  for (const auto& f : run.suite.files) {
    std::istringstream in(f.text);
    for (std::string line; std::getline(in, line);) defs += line.rfind("def test_", 0) == 0;
  }
  if (run.report.total_tests != static_cast<int>(defs)) {
    return {false, "total_tests " + std::to_string(run.report.total_tests) + " vs " + std::to_string(defs)};
  }

  std::set<std::string> covered;
  std::set<std::string> with_500;
  for (const auto& ex : run.session.exchanges) {
    if (!ex.status) continue;
    if (*ex.status >= 200 && *ex.status <= 299) covered.insert(ex.action.operation);
    if (*ex.status == 500) with_500.insert(ex.action.operation);
  }
  std::size_t hits = 0;
  for (const auto& op : run.config.schema.operations) hits += covered.count(op.identity());
  double coverage = 100.0 * static_cast<double>(hits) / static_cast<double>(run.config.schema.operations.size());
  double agg_coverage = report::endpoint_2xx_coverage(*run.report.rest);
  int agg_500 = report::endpoints_with_500(*run.report.rest);
  bool ok = coverage == agg_coverage && static_cast<int>(with_500.size()) == agg_500;
  return {ok, "valid, round trip exact, total_tests=" + std::to_string(defs) + ", 2xx coverage " +
                  fmt("%.1f", coverage) + "% = " + fmt("%.1f", agg_coverage) + "%, 500 endpoints " +
                  std::to_string(with_500.size()) + " = " + std::to_string(agg_500)};
}

Verdict criterion9() {
  auto once = [] {
    testbed::Testbed tb;
    tb.start();
    auto config = testbed_config(tb, testbed::token_auth_yaml(), 99);
    config.max_tests = 1000;
    http::HttplibTransport transport;
    return engine::run_session(config, transport);
  };
  auto a = once();
  auto b = once();
  bool actions = a.tests == b.tests && a.exchanges.size() == b.exchanges.size();
  for (std::size_t i = 0; actions && i < a.exchanges.size(); ++i) {
    actions = a.exchanges[i].action == b.exchanges[i].action;
  }
  std::set<Fault> fa(a.faults.begin(), a.faults.end());
  std::set<Fault> fb(b.faults.begin(), b.faults.end());
  return {actions && fa == fb, std::to_string(a.exchanges.size()) + " actions " +
                                   (actions ? "identical" : "differ") + ", " + std::to_string(fa.size()) +
                                   " faults " + (fa == fb ? "identical" : "differ")};
}

Verdict criterion10() {
  testbed::Testbed tb;
  tb.start();
  int passed = 0;
  long worst_over = -1000000;
  for (int trial = 0; trial < 10; ++trial) {
    auto config = testbed_config(tb, testbed::cookie_auth_yaml(), 1000 + static_cast<std::uint64_t>(trial));
    config.budget_seconds = 5;
    http::HttplibTransport transport;
    auto start = Clock::now();
    auto r = engine::run_session(config, transport);
    long wall = ms_since(start);
    long longest_test = 0;
    for (const auto& t : r.tests) {
      long sum = 0;
      for (std::size_t i = 0; i < t.actions.size(); ++i) sum += r.exchanges[t.first_exchange + i].elapsed_ms;
      longest_test = std::max(longest_test, sum);
    }
    long limit = 5000 + longest_test + 2000;
    passed += wall <= limit;
    worst_over = std::max(worst_over, wall - 5000);
  }
  return {passed == 10, std::to_string(passed) + "/10 trials in bound, worst overrun " + std::to_string(worst_over) +
                            " ms past 5 s"};
}

Verdict criterion11() {
  struct Case {
    std::string document;
    std::string origin;
    std::string expected;
  };
  std::vector<Case> cases = {
      {R"({"swagger":"2.0","info":{"title":"t","version":"1"},"basePath":"/v2","paths":{}})", "http://localhost:9000",
       "http://localhost:9000/v2"},
      {R"({"openapi":"3.0.0","info":{"title":"t","version":"1"},"servers":[{"url":"http://localhost:8080/rest"}],"paths":{}})",
       "http://localhost:9001", "http://localhost:9001/rest"},
      {R"({"openapi":"3.0.0","info":{"title":"t","version":"1"},"servers":[{"url":"/api/v3"}],"paths":{}})",
       "http://localhost:9002", "http://localhost:9002/api/v3"},
  };
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    auto got = openapi::resolve_base_url(openapi::load_schema(std::string_view(c.document)), http::Url::parse(c.origin))
                   .to_string();
    ok = ok && got == c.expected;
    detail += std::string(detail.empty() ? "" : ", ") + got;
  }
  return {ok, detail};
}

// Two-sided permutation p-value by enumerating every relabelling.
double enumerated_p(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> pooled(xs);
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  auto u_of = [&](unsigned mask) {
    double u = 0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      if (!(mask & (1u << i))) continue;
      for (std::size_t j = 0; j < pooled.size(); ++j) {
        if (mask & (1u << j)) continue;
        u += pooled[i] > pooled[j] ? 1.0 : pooled[i] == pooled[j] ? 0.5 : 0.0;
      }
    }
    return u;
  };
  const double center = static_cast<double>(xs.size() * ys.size()) / 2.0;
  const double observed = std::fabs(u_of((1u << xs.size()) - 1) - center);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (unsigned mask = 0; mask < (1u << pooled.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != xs.size()) continue;
    ++total;
    hits += std::fabs(u_of(mask) - center) >= observed - 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

Verdict criterion12() {
  std::size_t mw_cases = 0;
  for (std::size_t size = 2; size <= 8; ++size) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < size; ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<double> values;
      for (std::size_t c = code, i = 0; i < size; ++i, c /= 3) values.push_back(static_cast<double>(c % 3));
      for (std::size_t n = 1; n < size; ++n) {
        std::vector<double> xs(values.begin(), values.begin() + static_cast<long>(n));
        std::vector<double> ys(values.begin() + static_cast<long>(n), values.end());
        if (std::fabs(stats::mann_whitney_p(xs, ys) - enumerated_p(xs, ys)) > 1e-12) {
          return {false, "exact p differs from enumeration at n=" + std::to_string(n) + " m=" +
                             std::to_string(size - n)};
        }
        ++mw_cases;
      }
    }
  }

  std::mt19937_64 rng(12);
  for (int pair = 0; pair < 1000; ++pair) {
    std::uniform_int_distribution<int> len(1, 15);
    std::uniform_int_distribution<int> val(0, 9);
    std::vector<double> xs(static_cast<std::size_t>(len(rng)));
    std::vector<double> ys(static_cast<std::size_t>(len(rng)));
    for (auto& x : xs) x = val(rng);
    for (auto& y : ys) y = val(rng);
    double wins = 0;
    for (double x : xs) {
      for (double y : ys) wins += x > y ? 1.0 : x == y ? 0.5 : 0.0;
    }
    double brute = wins / static_cast<double>(xs.size() * ys.size());
    if (std::fabs(stats::a12(xs, ys) - brute) > 1e-12) return {false, "a12 differs at pair " + std::to_string(pair)};
  }

  for (int row = 0; row < 1000; ++row) {
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> val(0, 4);
    std::vector<double> values(static_cast<std::size_t>(len(rng)));
    for (auto& v : values) v = val(rng);
    auto direction = row % 2 ? stats::Direction::kLowerBetter : stats::Direction::kHigherBetter;
    auto ranks = stats::rank_row(values, direction);
    double k = static_cast<double>(values.size());
    if (std::fabs(std::accumulate(ranks.begin(), ranks.end(), 0.0) - k * (k + 1) / 2) > 1e-9) {
      return {false, "rank sum broken at row " + std::to_string(row)};
    }
  }
  return {true, std::to_string(mw_cases) + " exact Mann-Whitney cases, 1000 a12 pairs, 1000 ranked rows"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"Friedman on the rank fixtures", criterion1},
      {"coverage fixture footer means and medians", criterion2},
      {"rank_rows reproduces printed ranks", criterion3},
      {"complete separation A and p", criterion4},
      {"auth files round trip", criterion5},
      {"end-to-end session against the testbed", criterion6},
      {"emitted suite replays on a fresh testbed", criterion7},
      {"report contract", criterion8},
      {"same seed, same session", criterion9},
      {"5 s budget is honoured", criterion10},
      {"base URL resolution", criterion11},
      {"statistics oracles", criterion12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << v.detail << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
