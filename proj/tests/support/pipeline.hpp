#pragma once

// Offline end-to-end run: scripted responder, local sample service and the
// pytest runner, driven through the Service the way a tester would.

#include <filesystem>
#include <set>
#include <string>

#include "restcheck/service/service.hpp"
#include "restcheck/testkit/fixtures.hpp"
#include "restcheck/testkit/responder.hpp"
#include "restcheck/testkit/sample_service.hpp"

namespace pipeline {

using namespace restcheck;

// Fields that legitimately differ between two identical runs.
inline const std::set<std::string>& volatile_keys() {
  static const std::set<std::string> keys{"created_at", "updated_at", "archived_at", "timestamp", "started_at",
                                          "finished_at", "computed_at", "latency_ms"};
  return keys;
}

inline Json normalize(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) {
      if (volatile_keys().count(k) == 0) out[k] = normalize(v);
    }
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(normalize(v));
    return out;
  }
  return j;
}

struct Outcome {
  Json bundle;
  Json metrics;
  int executions = 0;
  int undefined_status_code_bugs = 0;
  int unmatched_prompts = 0;
  std::vector<std::string> problems;
};

inline Outcome run(const testkit::SampleService& sample, const std::filesystem::path& work_root) {
  Outcome out;
  auto responder = testkit::ScriptedResponder::from_file(testkit::fixture_dir() / "completions" / "routes.json");
  service::Service svc(std::make_unique<workflow::InMemoryStore>(), responder,
                       llm::LlmConfig::profile_named("gpt-4o"),
                       exec::RunnerConfig::pytest(testkit::runner_dir().string(), work_root.string()));
  const auto project = svc.create_project(testkit::spec_fixture("items").string(), sample.base_url());
  const auto pid = project.at("id").get<std::string>();
  const auto op = pid + ".op1";

  auto units = svc.run_task({service::TaskKind::unit_scenarios, op, {}});
  for (const auto& sid : units.at("scenario_ids")) {
    const auto scenario_id = sid.get<std::string>();
    svc.review(scenario_id, Json{{"verb", "accept"}});
    auto gen = svc.run_task({service::TaskKind::script, scenario_id, {}});
    const auto tid = gen.at("script_id").get<std::string>();
    if (gen.at("syntax") != "valid") out.problems.push_back(tid + " syntax " + gen.at("syntax").dump());
    svc.review(tid, Json{{"verb", "accept"}});
    auto ex = svc.run_task({service::TaskKind::execute, tid, {}});
    ++out.executions;
    out.undefined_status_code_bugs += ex.at("bug_tally").at("by_category").at("undefined-status-code").get<int>();
    svc.run_task({service::TaskKind::data_type_check, tid, {}});
    svc.run_task({service::TaskKind::method_coverage_check, tid, {}});
    svc.run_task({service::TaskKind::status_code_check, tid, {}});
    svc.set_data_type_verdict(tid, Json{{"valid", true}});
  }

  auto systems = svc.run_task({service::TaskKind::system_scenarios, pid, {}});
  const auto& sys_ids = systems.at("scenario_ids");
  if (!sys_ids.empty()) svc.review(sys_ids.front().get<std::string>(), Json{{"verb", "accept"}});
  if (sys_ids.size() > 1) svc.review(sys_ids.back().get<std::string>(), Json{{"verb", "reject"}});

  out.metrics = svc.metrics(pid);
  out.bundle = svc.export_bundle(pid);
  out.unmatched_prompts = static_cast<int>(responder->unmatched().size());
  return out;
}

}  // namespace pipeline
