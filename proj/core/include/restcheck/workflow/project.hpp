#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "restcheck/agents/agents.hpp"
#include "restcheck/agents/reports.hpp"
#include "restcheck/exec/executor.hpp"
#include "restcheck/llm/gateway.hpp"
#include "restcheck/metrics/metrics.hpp"
#include "restcheck/spec/spec_model.hpp"

namespace restcheck::workflow {

enum class Provenance { llm, llm_edited, manual };
enum class ReviewState { pending, accepted, rejected };
enum class Verb { accept, reject, revoke, edit, add };
enum class Actor { human, system };

std::string_view to_string(Provenance p) noexcept;  // "llm", "llm-edited", "manual"
std::string_view to_string(ReviewState s) noexcept;
std::string_view to_string(Verb v) noexcept;
std::string_view to_string(Actor a) noexcept;
Provenance parse_provenance(std::string_view text);
ReviewState parse_review_state(std::string_view text);
Verb parse_verb(std::string_view text);
Actor parse_actor(std::string_view text);

struct ArchivedText {
  std::string text;
  std::string archived_at;

  bool operator==(const ArchivedText&) const = default;
};

struct TestScenario {
  std::string id;
  agents::ScenarioKind kind = agents::ScenarioKind::unit;
  std::vector<std::string> operation_ids;  // one for unit scenarios
  std::string name;
  std::string description;
  std::optional<std::string> original_name;         // absent for manual
  std::optional<std::string> original_description;  // absent for manual
  Provenance provenance = Provenance::llm;
  ReviewState state = ReviewState::pending;
  std::vector<std::string> flags;
  std::string completion_id;
  std::vector<ArchivedText> history;
  std::string created_at;
  std::string updated_at;

  /// "Scenario Name: ...\nScenario Description: ..."
  std::string text() const;
  bool reviewed() const noexcept { return state != ReviewState::pending; }
  bool is_final() const noexcept { return state != ReviewState::rejected; }
  bool accepted_unmodified() const noexcept {
    return provenance == Provenance::llm && state == ReviewState::accepted;
  }

  bool operator==(const TestScenario&) const = default;
};

struct TestScript {
  std::string id;
  std::string scenario_id;
  std::vector<std::string> operation_ids;  // operations in scope
  std::string host_url;
  std::optional<std::string> original_text;  // absent for manual
  std::string text;
  Provenance provenance = Provenance::llm;
  ReviewState state = ReviewState::pending;
  std::optional<exec::SyntaxVerdict> original_syntax;  // verdict on the LLM text
  std::optional<exec::SyntaxVerdict> syntax;           // verdict on the current text
  std::optional<agents::DataTypeReport> data_type_report;
  std::optional<bool> data_type_verdict;  // human-confirmed Valid_DT
  std::optional<agents::MethodCoverageReport> method_coverage_report;
  std::optional<agents::StatusCodeReport> status_code_report;
  std::vector<std::string> execution_ids;
  bool needs_review = false;
  std::vector<std::string> warnings;
  std::string completion_id;
  std::vector<ArchivedText> history;
  std::string created_at;
  std::string updated_at;

  bool reviewed() const noexcept { return state != ReviewState::pending; }
  bool is_final() const noexcept { return state != ReviewState::rejected; }
  bool llm_origin() const noexcept { return provenance != Provenance::manual; }
  bool syntax_valid() const noexcept { return syntax == exec::SyntaxVerdict::valid; }

  bool operator==(const TestScript&) const = default;
};

/// One human or system review verb. For `add`, `target_id` names the owner:
/// an operation (unit scenario), the project (system scenario, with
/// `operation_ids`) or a scenario (script).
struct ReviewAction {
  std::string target_id;
  Verb verb = Verb::accept;
  std::optional<std::string> name;         // scenario edit/add
  std::optional<std::string> description;  // scenario edit/add
  std::optional<std::string> text;         // script edit/add
  std::vector<std::string> operation_ids;  // system scenario or script add
  Actor actor = Actor::human;
  std::string timestamp;
  std::string result_id;  // entity touched or created, filled on apply

  bool operator==(const ReviewAction&) const = default;
};

using metrics::MetricRecord;

using Clock = std::function<std::string()>;

/// All state of one testing project. Entity ids are prefixed by the project
/// id: "p1.op3", "p1.sc2", "p1.ts1", "p1.ex4", "p1.c7".
struct Project {
  std::string id;
  std::string source;
  std::string host_url;  // test target; defaults to the spec's server url
  std::string created_at;
  spec::ApiSpecification spec;
  std::vector<TestScenario> scenarios;
  std::vector<TestScript> scripts;
  std::vector<exec::ExecutionResult> executions;
  std::vector<MetricRecord> metric_records;
  std::vector<ReviewAction> actions;
  std::vector<llm::CompletionRecord> completions;
  int next_scenario = 1;
  int next_script = 1;
  int next_execution = 1;
  int next_completion = 1;

  std::string operation_id(const spec::ApiOperation& op) const { return id + "." + op.id; }
  const spec::ApiOperation* find_operation(std::string_view entity_id) const;
  const spec::ApiOperation& operation(std::string_view entity_id) const;  // throws not_found
  std::vector<std::string> operation_ids() const;

  TestScenario* find_scenario(std::string_view sid);
  const TestScenario* find_scenario(std::string_view sid) const;
  TestScenario& scenario(std::string_view sid);  // throws not_found
  const TestScenario& scenario(std::string_view sid) const;
  TestScript* find_script(std::string_view tid);
  const TestScript* find_script(std::string_view tid) const;
  TestScript& script(std::string_view tid);
  const TestScript& script(std::string_view tid) const;
  const exec::ExecutionResult* find_execution(std::string_view eid) const;
  const exec::ExecutionResult* latest_execution(const TestScript& t) const;

  std::vector<const TestScenario*> unit_scenarios(std::string_view op_id) const;
  std::vector<const TestScenario*> system_scenarios() const;
  std::vector<const TestScenario*> system_scenarios_of(std::string_view op_id) const;
  std::vector<const TestScript*> scripts_of(std::string_view scenario_id) const;

  /// Operations as bound into prompts: key plus rendered detail.
  std::vector<agents::OperationRef> operation_refs(std::span<const std::string> op_ids) const;

  bool operator==(const Project&) const;
};

/// Builds a project from a parsed spec. `host_url` overrides the spec's
/// server url when non-empty.
Project new_project(std::string id, spec::ApiSpecification spec, std::string host_url, const Clock& clock);

/// Stores a completion and returns its id.
std::string record_completion(Project& p, llm::CompletionRecord rec);

/// Each draft becomes a pending llm scenario with its original text kept.
/// Owners: one operation for unit drafts, the listed operations for system
/// drafts (a system draft's own referenced_operations win when present).
/// Identical texts already present are flagged, not merged.
std::vector<std::string> admit_drafts(Project& p, std::span<const agents::ScenarioDraft> drafts,
                                      std::span<const std::string> owner_op_ids, const std::string& completion_id,
                                      const Clock& clock);

/// Stores a generated script for a scenario as a pending llm script.
std::string admit_script(Project& p, const std::string& scenario_id, const agents::GeneratedScript& gen,
                         std::span<const std::string> op_ids, const Clock& clock);

/// Applies one review verb; returns the id of the entity touched or created.
///
///   accept  pending|accepted -> accepted
///   reject  pending|accepted -> rejected
///   revoke  rejected         -> pending
///   edit    pending|accepted -> accepted, llm becomes llm-edited,
///                               prior text archived
///   add     new manual entity, accepted
///
/// Anything else throws Error(illegal_transition) naming the current state.
/// Empty edit/add text throws Error(validation).
std::string apply_review(Project& p, ReviewAction action, const Clock& clock);

/// Stores an execution for a script and links it.
std::string admit_execution(Project& p, const std::string& script_id, exec::ExecutionResult result);

/// Default clock: exec::utc_timestamp.
Clock system_clock();

}  // namespace restcheck::workflow
