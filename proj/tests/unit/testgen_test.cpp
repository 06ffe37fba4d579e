// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "testbed.hpp"
#include "wfc/testgen.hpp"

namespace wfc::testgen {
namespace {

using Pair = std::pair<std::string, std::string>;

struct Session {
  openapi::ApiSchema schema;
  http::Url base_url;
  std::vector<auth::AuthenticationInfo> users;
  engine::SessionResult result;
  SuiteSelection selection;
  EmittedSuite suite;
};

const Session& session() {
  static const Session s = [] {
    Session out;
    testbed::Testbed tb;
    tb.start();
    http::HttplibTransport transport;
    engine::SessionConfig config;
    config.schema = openapi::load_schema(std::string_view(testbed::openapi_v3_document()));
    config.base_url = openapi::resolve_base_url(config.schema, http::Url::parse(tb.origin()));
    config.auth_entries = auth::resolve_template(auth::parse_auth_file(testbed::token_auth_yaml()));
    config.rng_seed = 21;
    config.max_tests = 1500;
    out.schema = config.schema;
    out.base_url = config.base_url;
    out.users = config.auth_entries;
    out.result = engine::run_session(config, transport);
    out.selection = select_suite(out.result);
    out.suite = emit_suite(out.selection, out.result, out.schema, out.base_url, out.users);
    return out;
  }();
  return s;
}

const engine::TestCase& test_by_id(std::size_t id) {
  for (const auto& t : session().result.tests) {
    if (t.id == id) return t;
  }
  throw std::out_of_range("no test " + std::to_string(id));
}

bool has_transport_error(const engine::TestCase& t) {
  const auto& ex = session().result.exchanges;
  return std::any_of(ex.begin() + t.first_exchange, ex.begin() + t.first_exchange + t.actions.size(),
                     [](const engine::HttpExchange& e) { return e.transport_error.has_value(); });
}

struct Witnessed {
  std::set<Fault> faults;
  std::set<Pair> pairs;
};

Witnessed witnessed(const std::vector<std::size_t>& ids) {
  Witnessed w;
  for (auto id : ids) {
    const auto& t = test_by_id(id);
    for (const auto& f : test_faults(session().result, t)) w.faults.insert(f);
    for (const auto& p : test_pairs(session().result, t)) w.pairs.insert(p);
  }
  return w;
}

TEST(SelectSuite, CoversEveryFaultAndPair) {
  const auto& s = session();
  ASSERT_FALSE(s.result.faults.empty());
  auto chosen = witnessed(s.selection.selected);
  for (const auto& f : s.result.faults) EXPECT_TRUE(chosen.faults.count(f)) << f.code << " " << f.endpoint;
  std::vector<std::size_t> all;
  for (const auto& t : s.result.tests) {
    if (!has_transport_error(t)) all.push_back(t.id);
  }
  EXPECT_EQ(chosen.pairs, witnessed(all).pairs);
}

TEST(SelectSuite, NoSelectedTestIsRedundant) {
  const auto& sel = session().selection.selected;
  auto full = witnessed(sel);
  for (std::size_t i = 0; i < sel.size(); ++i) {
    auto rest = sel;
    rest.erase(rest.begin() + static_cast<long>(i));
    auto w = witnessed(rest);
    EXPECT_TRUE(w.faults != full.faults || w.pairs != full.pairs) << "test " << sel[i];
  }
}

TEST(SelectSuite, SessionOrderAndReasons) {
  const auto& sel = session().selection;
  EXPECT_TRUE(std::is_sorted(sel.selected.begin(), sel.selected.end()));
  EXPECT_EQ(std::set<std::size_t>(sel.selected.begin(), sel.selected.end()).size(), sel.selected.size());
  ASSERT_EQ(sel.reasons.size(), sel.selected.size());
  for (std::size_t i = 0; i < sel.selected.size(); ++i) {
    bool reveals = !test_faults(session().result, test_by_id(sel.selected[i])).empty();
    EXPECT_EQ(sel.reasons[i] == SelectionReason::kFaultRevealing, reveals);
  }
}

TEST(SelectSuite, SkipsTestsWithTransportErrors) {
  engine::SessionResult r;
  engine::TestCase t;
  t.id = 0;
  t.actions.resize(1);
  t.actions[0].operation = "GET:/x";
  r.tests.push_back(t);
  engine::HttpExchange ex;
  ex.action = t.actions[0];
  ex.transport_error = "refused";
  r.exchanges.push_back(ex);
  EXPECT_TRUE(select_suite(r).selected.empty());
}

TEST(SelectSuite, PrefersShorterWitnesses) {
  engine::SessionResult r;
  for (std::size_t id = 0; id < 2; ++id) {
    engine::TestCase t;
    t.id = id;
    t.first_exchange = r.exchanges.size();
    t.actions.resize(id == 0 ? 3 : 1);
    for (std::size_t a = 0; a < t.actions.size(); ++a) {
      t.actions[a].operation = "GET:/x";
      engine::HttpExchange ex;
      ex.test_id = id;
      ex.action_index = a;
      ex.action = t.actions[a];
      ex.status = 500;
      ex.faults = {Fault{100, "GET:/x", "500#0"}};
      r.exchanges.push_back(ex);
    }
    r.tests.push_back(t);
  }
  r.faults = {Fault{100, "GET:/x", "500#0"}};
  auto sel = select_suite(r);
  EXPECT_EQ(sel.selected, std::vector<std::size_t>{1});
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const EmittedFile* file_named(const std::string& path) {
  for (const auto& f : session().suite.files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

TEST(EmitSuite, OneEmittedTestPerSelectedTest) {
  const auto& s = session();
  ASSERT_EQ(s.suite.tests.size(), s.selection.selected.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < s.suite.tests.size(); ++i) {
    EXPECT_EQ(s.suite.tests[i].test_id, s.selection.selected[i]);
    EXPECT_TRUE(names.insert(s.suite.tests[i].name).second);
    EXPECT_TRUE(s.suite.tests[i].name.starts_with("test_"));
  }
}

TEST(EmitSuite, LineRangesPointAtTheTestFunction) {
  for (const auto& t : session().suite.tests) {
    const auto* file = file_named(t.file);
    ASSERT_NE(file, nullptr) << t.file;
    auto lines = lines_of(file->text);
    ASSERT_GE(t.start_line, 1);
    ASSERT_LE(t.start_line, t.end_line);
    ASSERT_LE(t.end_line, static_cast<int>(lines.size()));
    bool has_def = false;
    for (int l = t.start_line; l <= t.end_line; ++l) {
      if (lines[l - 1].rfind("def " + t.name + "(", 0) == 0) has_def = true;
    }
    EXPECT_TRUE(has_def) << t.name;
  }
}

TEST(EmitSuite, FaultsAreAnnotatedAndStatusesAsserted) {
  for (const auto& t : session().suite.tests) {
    const auto& text = file_named(t.file)->text;
    auto lines = lines_of(text);
    std::string body;
    for (int l = t.start_line; l <= t.end_line; ++l) body += lines[l - 1] + "\n";
    EXPECT_EQ(t.faults, test_faults(session().result, test_by_id(t.test_id)));
    for (const auto& f : t.faults) {
      EXPECT_NE(body.find("# Fault" + std::to_string(f.code) + "."), std::string::npos) << t.name;
    }
    const auto& tc = test_by_id(t.test_id);
    for (std::size_t a = 0; a < tc.actions.size(); ++a) {
      const auto& ex = session().result.exchanges[tc.first_exchange + a];
      std::string var = "response_" + std::to_string(a);
      std::string exact = "assert " + var + ".status_code == " + std::to_string(*ex.status);
      int base = *ex.status / 100 * 100;
      std::string family = "assert " + std::to_string(base) + " <= " + var + ".status_code < " + std::to_string(base + 100);
      if (!ex.faults.empty()) {
        EXPECT_NE(body.find(exact), std::string::npos) << t.name << ": " << exact;
      } else {
        EXPECT_TRUE(body.find(exact) != std::string::npos || body.find(family) != std::string::npos) << t.name;
      }
    }
  }
}

TEST(EmitSuite, FilesAreGroupedByFaultCodes) {
  std::set<std::string> paths;
  for (const auto& f : session().suite.files) {
    EXPECT_TRUE(f.path.starts_with("test_")) << f.path;
    EXPECT_TRUE(f.path.ends_with(".py")) << f.path;
    EXPECT_NE(f.text.find("SUT_BASE_URL"), std::string::npos);
    paths.insert(f.path);
  }
  for (const auto& t : session().suite.tests) {
    std::set<int> codes;
    for (const auto& f : t.faults) codes.insert(f.code);
    std::string expected = "test_coverage.py";
    if (!codes.empty()) {
      expected = "test_faults";
      for (int c : codes) expected += "_" + std::to_string(c);
      expected += ".py";
    }
    EXPECT_EQ(t.file, expected);
  }
}

TEST(EmitSuite, NoSecretsOrVolatileValues) {
  for (const auto& f : session().suite.files) {
    EXPECT_EQ(f.text.find("tok-admin"), std::string::npos) << f.path;
    EXPECT_EQ(f.text.find("tok-user"), std::string::npos) << f.path;
  }
  EXPECT_TRUE(is_volatile_field("id"));
  EXPECT_TRUE(is_volatile_field("creationDate"));
  EXPECT_TRUE(is_volatile_field("timestamp"));
  EXPECT_FALSE(is_volatile_field("name"));
}

TEST(EmitSuite, DeterministicForTheSameSession) {
  const auto& s = session();
  auto again = emit_suite(s.selection, s.result, s.schema, s.base_url, s.users);
  ASSERT_EQ(again.files.size(), s.suite.files.size());
  for (std::size_t i = 0; i < again.files.size(); ++i) {
    EXPECT_EQ(again.files[i].path, s.suite.files[i].path);
    EXPECT_EQ(again.files[i].text, s.suite.files[i].text);
  }
}

TEST(EmitSuite, UnknownTestIdIsAnError) {
  SuiteSelection bogus;
  bogus.selected = {999999};
  bogus.reasons = {SelectionReason::kCoverageNovel};
  const auto& s = session();
  EXPECT_THROW(emit_suite(bogus, s.result, s.schema, s.base_url, s.users), EmitError);
}

}  // namespace
}  // namespace wfc::testgen
