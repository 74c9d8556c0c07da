#pragma once

#include <optional>
#include <string>
#include <vector>

#include "restcheck/workflow/project.hpp"

namespace restcheck::workflow {

/// Counts over a list of scenarios. Size and quality counts cover final
/// (non-rejected) scenarios; review progress covers every scenario shown.
struct ScenarioGroupSummary {
  int total = 0;  // including rejected
  int count = 0;  // final
  int reviewed = 0;
  double percent_reviewed = 0;  // 0 when there are none
  int accepted_unmodified = 0;
  double percent_accepted = 0;  // accepted_unmodified / count
  int manually_added = 0;
  int edited = 0;
  int rejected = 0;

  bool operator==(const ScenarioGroupSummary&) const = default;
};

struct ScriptGroupSummary {
  int total = 0;
  int count = 0;
  int reviewed = 0;
  double percent_reviewed = 0;
  int executed = 0;
  double percent_executed = 0;
  int accepted_unmodified = 0;
  double percent_accepted = 0;
  int manually_added = 0;
  int edited = 0;
  int failed = 0;            // latest execution has a non-passing case
  int syntax_errors = 0;     // current text is not valid
  int data_type_errors = 0;  // confirmed verdict false, else report mismatch
  int semantic_errors = 0;   // method coverage below 100
  int rejected = 0;

  bool operator==(const ScriptGroupSummary&) const = default;
};

struct OperationGroupSummary {
  int count = 0;
  int unit_test_completed = 0;    // every final unit scenario has an executed final script
  int system_test_completed = 0;  // covered by a final system scenario with an executed final script

  bool operator==(const OperationGroupSummary&) const = default;
};

/// Size, progress and quality metrics of one entity. Which groups are set
/// depends on the entity: a project has operations and system scenarios,
/// an operation has unit and system scenarios, a scenario has scripts.
struct SummarySnapshot {
  std::string entity_id;
  std::string entity_type;  // "project", "operation", "scenario"
  std::optional<OperationGroupSummary> operations;
  std::optional<ScenarioGroupSummary> unit_scenarios;
  std::optional<ScenarioGroupSummary> system_scenarios;
  std::optional<ScriptGroupSummary> scripts;

  bool operator==(const SummarySnapshot&) const = default;
};

ScenarioGroupSummary summarize_scenarios(const std::vector<const TestScenario*>& items);
ScriptGroupSummary summarize_scripts(const Project& p, const std::vector<const TestScript*>& items);

/// Live query over current entity states. Throws Error(not_found).
SummarySnapshot compute_summary(const Project& p, std::string_view entity_id);

enum class NodeType { home, spec, operation_unit_scenarios, system_scenarios, operation_system_scenarios, scenario_scripts };

std::string_view to_string(NodeType t) noexcept;

struct EntityNode {
  std::string id;
  NodeType node_type = NodeType::home;
  std::string entity_id;  // project, operation or scenario the node stands for
  std::string display_name;
  double completion_percent = 100;  // reviewed children / children, 100 when childless
  int children_total = 0;
  int children_reviewed = 0;
  std::vector<EntityNode> children;
};

/// Navigation tree: home > spec > per operation unit-scenario nodes, the
/// system-scenario node and per operation system-scenario nodes, each
/// scenario carrying its scripts node. The spec node's children are the
/// operations; an operation counts as reviewed once it has unit scenarios
/// and all of them are reviewed.
EntityNode build_tree(const Project& p);

Json to_json(const SummarySnapshot& s);
Json to_json(const EntityNode& n);

}  // namespace restcheck::workflow
