#include <gtest/gtest.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>

#include "restcheck/exec/executor.hpp"
#include "restcheck/testkit/fixtures.hpp"
#include "restcheck/testkit/sample_service.hpp"

using namespace restcheck;
using namespace restcheck::exec;

namespace {

std::string script(const std::string& name) { return testkit::read_file(testkit::fixture_dir() / "scripts" / name); }

std::string work_root() {
  auto dir = std::filesystem::temp_directory_path() / ("restcheck-exec-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir.string();
}

const spec::ApiSpecification& items() {
  static const auto s = spec::load_spec(testkit::spec_fixture("items").string());
  return s;
}

TestCaseResult failed_case(std::string name, std::string message, std::vector<CapturedResponse> responses) {
  return TestCaseResult{std::move(name), Outcome::failed, std::move(message), std::move(responses)};
}

}  // namespace

TEST(MatchOperation, PrefersLiteralSegments) {
  const auto& ops = items().operations;
  EXPECT_EQ(match_operation(ops, "GET", "/items"), "GET /items");
  EXPECT_EQ(match_operation(ops, "get", "/items/7"), "GET /items/{itemId}");
  EXPECT_EQ(match_operation(ops, "POST", "/items"), "POST /items");
  EXPECT_FALSE(match_operation(ops, "DELETE", "/items/7").has_value());
  EXPECT_FALSE(match_operation(ops, "GET", "/other").has_value());
}

TEST(TallyBugs, Categories) {
  const auto& ops = items().operations;
  std::vector<TestCaseResult> cases = {
      {"test_ok", Outcome::passed, "", {{"GET", "/items", 200, ""}}},
      failed_case("test_undeclared", "assert 500 == 200", {{"GET", "/items", 500, ""}}),
      failed_case("test_status", "assert response.status_code == 200", {{"GET", "/items/1", 404, ""}}),
      failed_case("test_schema", "AssertionError: item is missing required property name", {{"GET", "/items", 200, ""}}),
      failed_case("test_other", "ValueError: boom", {}),
      {"test_error", Outcome::error, "fixture broke", {}},
  };
  auto tally = tally_bugs(cases, ops, "");
  EXPECT_EQ(tally.total, 4);
  EXPECT_EQ(tally.undefined_status_code, 1);
  EXPECT_EQ(tally.spec_inconsistency, 1);
  EXPECT_EQ(tally.functional_error, 2);
  EXPECT_EQ(tally.items[0].category, BugCategory::undefined_status_code);
  EXPECT_NE(tally.items[0].evidence.find("GET /items returned 500"), std::string::npos);

  auto codes = observed_codes(cases, ops, "");
  EXPECT_EQ(codes.at("GET /items"), (std::set<int>{200, 500}));
  EXPECT_EQ(codes.at("GET /items/{itemId}"), (std::set<int>{404}));
}

TEST(RunnerReport, ParseAndReject) {
  auto cases = parse_runner_report(
      R"([{"name": "test_a", "outcome": "failed", "responses": [{"method": "GET", "path": "/x", "status": 200}]}])");
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].message, "assertion failed");
  EXPECT_EQ(cases[0].responses[0].status, 200);
  for (const char* bad : {"{}", "not json", R"([{"outcome": "passed"}])", R"([{"name": "a", "outcome": "odd"}])"}) {
    try {
      parse_runner_report(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::runner_failure) << bad;
    }
  }
}

TEST(CorrectnessScore, PassRate) {
  ExecutionResult r;
  EXPECT_THROW(correctness_score(r), Error);
  r.cases = {{"a", Outcome::passed, "", {}}, {"b", Outcome::failed, "x", {}}, {"c", Outcome::error, "", {}},
             {"d", Outcome::passed, "", {}}};
  EXPECT_DOUBLE_EQ(correctness_score(r), 0.5);
}

TEST(RunnerConfigTest, JsonRoundTripAndValidation) {
  auto c = RunnerConfig::pytest(testkit::runner_dir().string(), work_root());
  EXPECT_NE(c.run_command.find("run_pytest.py"), std::string::npos);
  auto back = RunnerConfig::from_json(c.to_json(), testkit::runner_dir().string());
  EXPECT_EQ(back.run_command, c.run_command);
  EXPECT_EQ(back.timeout_seconds, c.timeout_seconds);
  RunnerConfig bad = c;
  bad.timeout_seconds = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(ExecutionJson, RoundTrip) {
  ExecutionResult r;
  r.id = "p1.ex1";
  r.script_id = "p1.ts1";
  r.exit_code = 1;
  r.cases = {failed_case("t", "assert 500 == 200", {{"GET", "/items", 500, "ab"}})};
  r.observed_status_codes = {{"GET /items", {500}}};
  r.bugs = tally_bugs(r.cases, items().operations, "");
  r.raw_output = "out";
  EXPECT_EQ(execution_from_json(to_json(r)), r);
  EXPECT_FALSE(r.all_passed());
  EXPECT_NE(execution_summary_text(r).find("GET /items"), std::string::npos);
}

class ExecutorTest : public ::testing::Test {
 protected:
  void SetUp() override { service.start(); }
  testkit::SampleService service;
  Executor executor{RunnerConfig::pytest(testkit::runner_dir().string(), work_root())};
};

TEST_F(ExecutorTest, SyntaxCheck) {
  EXPECT_EQ(executor.syntax_check(script("items_passing.py")).verdict, SyntaxVerdict::valid);
  auto bad = executor.syntax_check(script("syntax_error.py"));
  EXPECT_EQ(bad.verdict, SyntaxVerdict::invalid);
  EXPECT_FALSE(bad.output.empty());
}

TEST_F(ExecutorTest, PassingScriptAgainstSampleService) {
  auto r = executor.execute(script("items_passing.py"), items().operations, service.base_url());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.report_error.empty()) << r.report_error;
  ASSERT_EQ(r.cases.size(), 2u);
  EXPECT_TRUE(r.all_passed());
  EXPECT_EQ(r.cases[0].name, "test_get_existing_item");
  EXPECT_EQ(r.observed_status_codes.at("GET /items/{itemId}"), (std::set<int>{200, 404}));
  EXPECT_EQ(r.bugs.total, 0);
}

TEST_F(ExecutorTest, FaultsBecomeBugs) {
  service.set_faults({{"GET /items", testkit::FaultKind::undeclared_code, 500, 0}});
  auto undeclared = executor.execute(script("items_schema_check.py"), items().operations, service.base_url());
  EXPECT_EQ(undeclared.bugs.undefined_status_code, 1);

  service.set_faults({{"GET /items", testkit::FaultKind::schema_violation, 500, 0}});
  auto schema = executor.execute(script("items_schema_check.py"), items().operations, service.base_url());
  EXPECT_EQ(schema.bugs.spec_inconsistency, 1);

  service.set_faults({{"GET /items/{itemId}", testkit::FaultKind::wrong_status, 404, 1}});
  auto wrong = executor.execute(script("items_passing.py"), items().operations, service.base_url());
  EXPECT_EQ(wrong.bugs.functional_error, 1);
  EXPECT_EQ(wrong.bugs.items[0].case_name, "test_get_existing_item");
}

TEST_F(ExecutorTest, TimeoutKeepsFinishedCases) {
  auto config = executor.config();
  config.timeout_seconds = 3;
  Executor quick(config);
  const auto start = std::chrono::steady_clock::now();
  auto r = quick.execute(script("sleeps.py"), items().operations, service.base_url());
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(30));
  EXPECT_TRUE(r.timed_out);
  EXPECT_FALSE(r.exit_code.has_value());
  ASSERT_EQ(r.cases.size(), 2u);
  EXPECT_EQ(r.cases[0].outcome, Outcome::passed);
  EXPECT_EQ(r.cases[1].outcome, Outcome::error);
}

TEST_F(ExecutorTest, MissingInterpreterIsAConfigError) {
  auto config = executor.config();
  config.syntax_check_command = "restcheck-no-such-binary {script}";
  Executor broken(config);
  try {
    broken.syntax_check("x = 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::runner_config);
  }
}
