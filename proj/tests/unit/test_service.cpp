#include <gtest/gtest.h>
#include <httplib.h>
#include <unistd.h>

#include <filesystem>

#include "pipeline.hpp"
#include "restcheck/service/http_api.hpp"
#include "restcheck/service/service.hpp"

using namespace restcheck;
using namespace restcheck::service;

namespace {

std::filesystem::path work_root() {
  auto dir = std::filesystem::temp_directory_path() / ("restcheck-service-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::unique_ptr<Service> make_service(bool with_runner = true) {
  auto responder = testkit::ScriptedResponder::from_file(testkit::fixture_dir() / "completions" / "routes.json");
  std::optional<exec::RunnerConfig> runner;
  if (with_runner) runner = exec::RunnerConfig::pytest(testkit::runner_dir().string(), work_root().string());
  return std::make_unique<Service>(std::make_unique<workflow::InMemoryStore>(), responder,
                                   llm::LlmConfig::profile_named("gpt-4o"), runner);
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

std::string items_spec() { return testkit::spec_fixture("items").string(); }

}  // namespace

TEST(ServiceTest, ProjectLifecycle) {
  auto svc = make_service();
  auto p = svc->create_project(items_spec(), "http://127.0.0.1:1");
  EXPECT_EQ(p.at("id"), "p1");
  EXPECT_EQ(svc->create_project(items_spec()).at("id"), "p2");
  EXPECT_EQ(svc->list_projects().size(), 2u);
  auto op = svc->operation("p1.op1");
  EXPECT_EQ(op.at("key"), "GET /items");
  EXPECT_EQ(Service::project_of("p1.sc3"), "p1");
  EXPECT_EQ(error_of([&] { svc->project("p9"); }), ErrorCode::not_found);
  EXPECT_EQ(error_of([&] { svc->create_project("/nonexistent/spec.json"); }), ErrorCode::spec_unreachable);
}

TEST(ServiceTest, ExportImport) {
  auto svc = make_service();
  svc->create_project(items_spec(), "http://127.0.0.1:1");
  svc->run_task({TaskKind::unit_scenarios, "p1.op1", {}});
  auto bundle = svc->export_bundle("p1");
  EXPECT_EQ(error_of([&] { svc->import_project(bundle); }), ErrorCode::validation);  // id taken

  auto other = make_service();
  other->import_project(bundle);
  EXPECT_EQ(other->export_bundle("p1"), bundle);
}

TEST(ServiceTest, UnitScenariosAndReview) {
  auto svc = make_service();
  svc->create_project(items_spec(), "http://127.0.0.1:1");
  auto res = svc->run_task({TaskKind::unit_scenarios, "p1.op1", {}});
  ASSERT_EQ(res.at("scenario_ids").size(), 2u);
  const auto sc = res.at("scenario_ids")[0].get<std::string>();
  auto view = svc->scenario(sc);
  EXPECT_EQ(view.at("review_state"), "pending");
  EXPECT_EQ(view.at("operations")[0].at("key"), "GET /items");

  auto reviewed = svc->review(sc, Json{{"verb", "accept"}});
  EXPECT_EQ(reviewed.at("result_id"), sc);
  EXPECT_EQ(reviewed.at("node").at("id"), "p1.op1/unit");
  EXPECT_DOUBLE_EQ(reviewed.at("node").at("completion_percent").get<double>(), 50.0);
  EXPECT_EQ(reviewed.at("summary").at("unit_scenarios").at("accepted_unmodified"), 1);

  EXPECT_EQ(error_of([&] { svc->review(sc, Json{{"verb", "revoke"}}); }), ErrorCode::illegal_transition);
  EXPECT_EQ(error_of([&] { svc->review(sc, Json{{"verb", "dance"}}); }), ErrorCode::validation);
  auto project = svc->load("p1");
  ASSERT_EQ(project.completions.size(), 1u);
  EXPECT_EQ(project.completions[0].template_name, "generate_test_scenario_prompt");
}

TEST(ServiceTest, StageGatesLeaveStateUntouched) {
  auto svc = make_service();
  svc->create_project(items_spec(), "http://127.0.0.1:1");
  const auto sc = svc->run_task({TaskKind::unit_scenarios, "p1.op1", {}}).at("scenario_ids")[0].get<std::string>();
  const auto before = svc->export_bundle("p1");
  EXPECT_EQ(error_of([&] { svc->check_gate({TaskKind::script, sc, {}}); }), ErrorCode::stage_gate);
  EXPECT_EQ(error_of([&] { svc->run_task({TaskKind::script, sc, {}}); }), ErrorCode::stage_gate);
  EXPECT_EQ(error_of([&] { svc->add_script(Json{{"scenario_id", sc}, {"text", "x = 1\n"}}); }),
            ErrorCode::stage_gate);
  EXPECT_EQ(svc->export_bundle("p1"), before);

  svc->review(sc, Json{{"verb", "accept"}});
  const auto ts = svc->run_task({TaskKind::script, sc, {}}).at("script_id").get<std::string>();
  EXPECT_EQ(svc->script(ts).at("syntax"), "valid");
  const auto after_script = svc->export_bundle("p1");
  EXPECT_EQ(error_of([&] { svc->run_task({TaskKind::execute, ts, {}}); }), ErrorCode::stage_gate);
  EXPECT_EQ(error_of([&] { svc->run_task({TaskKind::status_code_check, ts, {}}); }), ErrorCode::stage_gate);
  EXPECT_EQ(svc->export_bundle("p1"), after_script);
}

TEST(ServiceTest, RunnerIsRequiredForExecution) {
  auto svc = make_service(false);
  svc->create_project(items_spec(), "http://127.0.0.1:1");
  const auto sc = svc->run_task({TaskKind::unit_scenarios, "p1.op1", {}}).at("scenario_ids")[0].get<std::string>();
  svc->review(sc, Json{{"verb", "accept"}});
  const auto ts = svc->run_task({TaskKind::script, sc, {}}).at("script_id").get<std::string>();
  EXPECT_TRUE(svc->script(ts).at("syntax").is_null());
  EXPECT_EQ(error_of([&] { svc->run_task({TaskKind::syntax_check, ts, {}}); }), ErrorCode::runner_config);
}

TEST(ServiceTest, ManualEntitiesAndEdit) {
  auto svc = make_service();
  svc->create_project(items_spec(), "http://127.0.0.1:1");
  auto added = svc->add_scenario(Json{{"target_id", "p1.op3"}, {"name", "Fetch item 2"}, {"description", "GET /items/2"}});
  const auto sc = added.at("result_id").get<std::string>();
  auto script = svc->add_script(Json{{"scenario_id", sc}, {"text", "def test_a(:\n"}});
  const auto ts = script.at("result_id").get<std::string>();
  EXPECT_EQ(svc->script(ts).at("syntax"), "invalid");
  svc->review(ts, Json{{"verb", "edit"}, {"text", "def test_a():\n    pass\n"}});
  auto view = svc->script(ts);
  EXPECT_EQ(view.at("syntax"), "valid");
  EXPECT_EQ(view.at("provenance"), "manual");
  EXPECT_EQ(view.at("scenario_text"), "Scenario Name: Fetch item 2\nScenario Description: GET /items/2");
}

TEST(ServiceTest, EndToEndPipeline) {
  testkit::SampleService sample({{"GET /items", testkit::FaultKind::undeclared_code, 500, 0}});
  sample.start();
  auto out = pipeline::run(sample, work_root());
  EXPECT_TRUE(out.problems.empty()) << out.problems.front();
  EXPECT_EQ(out.unmatched_prompts, 0);
  EXPECT_EQ(out.executions, 2);
  EXPECT_GE(out.undefined_status_code_bugs, 1);
  EXPECT_EQ(out.bundle.at("executions").size(), 2u);
  bool cov_ops_defined = false;
  for (const auto& r : out.metrics.at("records"))
    if (r.at("metric") == "Cov_Ops") cov_ops_defined = !r.at("value").is_null();
  EXPECT_TRUE(cov_ops_defined);
}

TEST(ErrorMapping, HttpStatus) {
  EXPECT_EQ(http_status(ErrorCode::validation), 400);
  EXPECT_EQ(http_status(ErrorCode::not_found), 404);
  EXPECT_EQ(http_status(ErrorCode::stage_gate), 409);
  EXPECT_EQ(http_status(ErrorCode::illegal_transition), 409);
  EXPECT_EQ(http_status(ErrorCode::spec_not_json), 422);
  EXPECT_EQ(http_status(ErrorCode::llm_timeout), 502);
  EXPECT_EQ(http_status(ErrorCode::report_parse), 502);
  EXPECT_EQ(http_status(ErrorCode::store_unavailable), 503);
  EXPECT_EQ(http_status(ErrorCode::internal), 500);
  auto env = error_envelope(Error(ErrorCode::stage_gate, "nope", Json{{"entity", "p1.sc1"}}));
  EXPECT_EQ(env.at("code"), "stage_gate");
  EXPECT_EQ(env.at("details").at("entity"), "p1.sc1");
}

class HttpApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service = make_service();
    api = std::make_unique<HttpApi>(*service, 2);
    port = api->start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(120, 0);
  }
  void TearDown() override { api->stop(); }

  std::pair<int, Json> post(const std::string& path, const Json& body = Json::object(), httplib::Headers headers = {}) {
    auto res = client->Post(path, headers, body.dump(), "application/json");
    if (!res) return {0, nullptr};
    return {res->status, res->body.empty() ? Json() : Json::parse(res->body)};
  }
  std::pair<int, Json> get(const std::string& path) {
    auto res = client->Get(path);
    if (!res) return {0, nullptr};
    return {res->status, Json::parse(res->body)};
  }
  Json finish(const Json& accepted) {
    auto [status, task] = get("/tasks/" + accepted.at("task_id").get<std::string>() + "?wait=120");
    EXPECT_EQ(status, 200);
    EXPECT_EQ(task.at("state"), "succeeded") << task.dump();
    return task.at("result");
  }

  std::unique_ptr<Service> service;
  std::unique_ptr<HttpApi> api;
  std::unique_ptr<httplib::Client> client;
  int port = 0;
};

TEST_F(HttpApiTest, HealthAndProjects) {
  EXPECT_EQ(get("/health").first, 200);
  auto [status, project] = post("/projects", Json{{"source", items_spec()}, {"host_url", "http://127.0.0.1:1"}});
  EXPECT_EQ(status, 201);
  EXPECT_EQ(project.at("id"), "p1");
  EXPECT_EQ(get("/projects/p1/tree").first, 200);
  EXPECT_EQ(get("/projects/p1/summary").second.at("entity_type"), "project");
  EXPECT_EQ(get("/operations/p1.op2").second.at("key"), "POST /items");
  auto [missing, envelope] = get("/operations/p1.op9");
  EXPECT_EQ(missing, 404);
  EXPECT_EQ(envelope.at("code"), "not_found");
  EXPECT_EQ(post("/projects", Json{{"nosource", 1}}).first, 400);
}

TEST_F(HttpApiTest, TaskProtocolAndGates) {
  post("/projects", Json{{"source", items_spec()}, {"host_url", "http://127.0.0.1:1"}});
  auto [status, accepted] = post("/operations/p1.op1/unit-scenarios:generate");
  ASSERT_EQ(status, 202);
  EXPECT_EQ(accepted.at("kind"), "unit-scenarios");
  auto result = finish(accepted);
  const auto sc = result.at("scenario_ids")[0].get<std::string>();

  const auto before = get("/projects/p1/export").second;
  auto [gate, envelope] = post("/scenarios/" + sc + "/scripts:generate");
  EXPECT_EQ(gate, 409);
  EXPECT_EQ(envelope.at("code"), "stage_gate");
  EXPECT_EQ(get("/projects/p1/export").second, before);

  auto [rs, review] = post("/scenarios/" + sc + "/review", Json{{"verb", "accept"}});
  EXPECT_EQ(rs, 200);
  EXPECT_EQ(review.at("node").at("children_reviewed"), 1);
  auto script = finish(post("/scenarios/" + sc + "/scripts:generate").second);
  const auto ts = script.at("script_id").get<std::string>();
  EXPECT_EQ(post("/scripts/" + ts + ":execute").first, 409);
  EXPECT_EQ(post("/scripts/" + ts + "/checks:status-code").first, 409);
  EXPECT_EQ(get("/scripts/" + ts).second.at("review_state"), "pending");
  EXPECT_EQ(get("/tasks/t999").first, 404);
}

TEST_F(HttpApiTest, IdempotentPost) {
  post("/projects", Json{{"source", items_spec()}, {"host_url", "http://127.0.0.1:1"}});
  const Json body{{"target_id", "p1.op1"}, {"name", "manual"}, {"description", "GET /items"}};
  auto first = post("/scenarios", body, {{"Idempotency-Key", "k1"}});
  auto second = post("/scenarios", body, {{"Idempotency-Key", "k1"}});
  EXPECT_EQ(first.first, 201);
  EXPECT_EQ(first, second);
  auto third = post("/scenarios", body, {{"Idempotency-Key", "k2"}});
  EXPECT_NE(third.second.at("result_id"), first.second.at("result_id"));
  EXPECT_EQ(get("/operations/p1.op1/summary").second.at("unit_scenarios").at("total"), 2);
}

TEST_F(HttpApiTest, MalformedBody) {
  auto res = client->Post("/projects", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}
