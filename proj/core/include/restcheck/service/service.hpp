#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "restcheck/agents/agents.hpp"
#include "restcheck/exec/executor.hpp"
#include "restcheck/llm/gateway.hpp"
#include "restcheck/workflow/project.hpp"
#include "restcheck/workflow/store.hpp"

namespace restcheck::service {

/// Long-running work started through the task protocol.
enum class TaskKind {
  unit_scenarios,       // target: operation id
  system_scenarios,     // target: project id, operation_ids: subset (empty = all)
  script,               // target: scenario id
  syntax_check,         // target: script id
  execute,              // target: script id
  data_type_check,      // target: script id
  method_coverage_check,
  status_code_check,    // static after a passing run, dynamic after a failing one
};

std::string_view to_string(TaskKind kind) noexcept;

struct TaskRequest {
  TaskKind kind = TaskKind::unit_scenarios;
  std::string target;
  std::vector<std::string> operation_ids;
};

struct ServiceConfig {
  std::string store = ":memory:";
  llm::LlmConfig llm;
  std::optional<exec::RunnerConfig> runner;  // execution and syntax checks need one
  int workers = 4;
  agents::AgentOptions agent;

  /// Keys: store, llm (LlmConfig keys), runner (RunnerConfig keys), workers,
  /// prompt-char-budget.
  static ServiceConfig from_json(const Json& j, const std::string& default_runner_dir);
};

/// The workflow behind the HTTP API. Every call loads the project from the
/// store, applies one step and saves it back. Mutations of one project are
/// serialized; LLM calls run without holding the project lock, and their
/// output is admitted only after the stage gate is checked again.
class Service {
 public:
  Service(std::unique_ptr<workflow::ProjectStore> store, std::shared_ptr<llm::ChatTransport> transport,
          llm::LlmConfig llm, std::optional<exec::RunnerConfig> runner, workflow::Clock clock = workflow::system_clock(),
          agents::AgentOptions agent_options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Projects
  Json create_project(const std::string& source, const std::string& host_url = "");
  Json import_project(const Json& bundle);
  Json list_projects();
  Json project(const std::string& project_id);
  Json tree(const std::string& project_id);
  Json entities(const std::string& project_id);
  Json export_bundle(const std::string& project_id);

  // Entity views. Scenarios and scripts embed the operation details that
  // were bound into their prompts.
  Json operation(const std::string& op_id);
  Json scenario(const std::string& scenario_id);
  Json script(const std::string& script_id);
  Json execution(const std::string& execution_id);
  Json summary(const std::string& entity_id);

  /// Throws Error(stage_gate) when the request is out of order. Never mutates.
  void check_gate(const TaskRequest& request);
  /// Runs a task to completion; checks the gate again first.
  Json run_task(const TaskRequest& request);

  /// Review verbs on scenarios and scripts. Body keys: verb, name,
  /// description (scenarios), text (scripts). Returns the result id, the
  /// refreshed summary of the owner and the owner node's completion percent.
  Json review(const std::string& entity_id, const Json& body);
  /// Manual scenario: {target_id: op id or project id, name, description, operation_ids}.
  Json add_scenario(const Json& body);
  /// Manual script: {scenario_id, text}. The scenario must be accepted.
  Json add_script(const Json& body);
  /// Human confirmation of the data-type check: {valid: bool}.
  Json set_data_type_verdict(const std::string& script_id, const Json& body);

  /// Computes and stores every metric for a project or operation scope.
  /// Undefined metrics are flagged per record.
  Json metrics(const std::string& scope);

  /// The project an entity id belongs to ("p1.sc3" -> "p1").
  static std::string project_of(std::string_view entity_id);

  /// Direct access for tests and tools.
  workflow::Project load(const std::string& project_id);

 private:
  struct Locks {
    std::shared_mutex rw;
    std::mutex exec;
  };
  Locks& locks(const std::string& project_id);
  void save(const workflow::Project& p);
  agents::Agents agents_for(const std::string& project_id);
  void check_gate_locked(const workflow::Project& p, const TaskRequest& request) const;
  std::optional<exec::SyntaxVerdict> syntax_of(std::string_view text);

  Json run_unit_scenarios(const TaskRequest& r);
  Json run_system_scenarios(const TaskRequest& r);
  Json run_script(const TaskRequest& r);
  Json run_syntax_check(const TaskRequest& r);
  Json run_execute(const TaskRequest& r);
  Json run_check(const TaskRequest& r);

  std::unique_ptr<workflow::ProjectStore> store_;
  llm::LlmGateway gateway_;
  std::optional<exec::RunnerConfig> runner_;
  workflow::Clock clock_;
  agents::AgentOptions agent_options_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<Locks>, std::less<>> locks_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code) noexcept;

/// {code, message, details}
Json error_envelope(const Error& e);

}  // namespace restcheck::service
