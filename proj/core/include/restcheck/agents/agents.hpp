#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "restcheck/agents/reports.hpp"
#include "restcheck/llm/gateway.hpp"
#include "restcheck/llm/prompt.hpp"

namespace restcheck::agents {

enum class ScenarioKind { unit, system };

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind parse_scenario_kind(std::string_view text);

struct ScenarioDraft {
  int ordinal = 0;
  std::string name;
  std::string description;
  ScenarioKind kind = ScenarioKind::unit;
  std::vector<std::string> referenced_operations;  // endpoint keys, system drafts only
  std::vector<std::string> flags;

  bool operator==(const ScenarioDraft&) const = default;
};

struct ScenarioParse {
  std::vector<ScenarioDraft> drafts;
  std::vector<std::string> warnings;
};

/// Line-oriented parse of a numbered "Scenario Name: / Scenario Description:"
/// list. An item starts at a line matching `^\s*\d+\.\s*Scenario Name:`;
/// description lines accumulate until the next item. Skipped numbers are
/// renumbered with a warning. Zero items is not an error here.
ScenarioParse parse_scenario_list(std::string_view text);

/// Inverse of parse_scenario_list for well-formed drafts.
std::string serialize_scenario_list(std::span<const ScenarioDraft> drafts);

/// "Scenario Name: ...\nScenario Description: ..." as bound into prompts.
std::string scenario_prompt_text(std::string_view name, std::string_view description);

struct OperationRef {
  std::string key;     // "METHOD /path"
  std::string detail;  // rendered operation detail
};

/// Case-insensitive "METHOD /path" match over `description`. A key that only
/// occurs as the prefix of a longer path is reported in `ambiguous`.
struct OperationMentions {
  std::vector<std::string> matched;
  std::vector<std::string> ambiguous;
};
OperationMentions find_operation_mentions(std::string_view description, std::span<const OperationRef> ops);

struct ScenarioGeneration {
  std::string raw_completion;
  std::string completion_id;
  std::vector<ScenarioDraft> drafts;
  std::vector<std::string> warnings;
};

struct GeneratedScript {
  std::string raw_completion;
  std::string script_text;
  std::string completion_id;
  std::vector<std::string> operations_in_scope;  // endpoint keys
  std::string host_url;
  bool needs_review = false;
  std::vector<std::string> warnings;
};

template <typename Report>
struct CheckResult {
  std::string raw_completion;
  Report report;
};

struct AgentOptions {
  std::size_t prompt_char_budget = 200000;
};

/// Persists a completion before anything parses it; returns the stored id.
using RecordCompletion = std::function<std::string(const llm::CompletionRecord&)>;

/// The LLM-backed agents. Each call renders one template, sends it through
/// the gateway (which records the raw completion), then parses the output.
/// Agents never touch workflow state.
class Agents {
 public:
  Agents(llm::LlmGateway& gateway, const llm::TemplateStore& templates, AgentOptions options = {},
         RecordCompletion record = {});

  ScenarioGeneration generate_unit_scenarios(const OperationRef& op);
  ScenarioGeneration generate_system_scenarios(std::span<const OperationRef> ops);
  GeneratedScript generate_test_script(std::string_view scenario_text, std::span<const OperationRef> ops,
                                       std::string_view host_url);
  CheckResult<DataTypeReport> check_data_types(std::string_view scenario_text, std::span<const OperationRef> ops,
                                               std::string_view script_text);
  CheckResult<MethodCoverageReport> check_method_coverage(std::string_view scenario_text,
                                                          std::span<const OperationRef> ops,
                                                          std::string_view script_text);
  CheckResult<StatusCodeReport> check_status_codes_static(std::string_view scenario_text,
                                                          std::span<const OperationRef> ops,
                                                          std::string_view script_text);
  CheckResult<StatusCodeReport> check_status_codes_dynamic(std::string_view scenario_text,
                                                           std::span<const OperationRef> ops,
                                                           std::string_view execution_result);

 private:
  struct Exchange {
    std::string text;
    std::string record_id;
  };
  Exchange exchange(llm::TemplateName name, const llm::Bindings& bindings);
  ScenarioGeneration scenarios(llm::TemplateName name, std::span<const OperationRef> ops, ScenarioKind kind);

  llm::LlmGateway& gateway_;
  const llm::TemplateStore& templates_;
  AgentOptions options_;
  RecordCompletion record_;
};

/// Joins operation details the way they are bound to {{selected_apis}}.
std::string join_details(std::span<const OperationRef> ops);

/// Heuristic: does the text look like Python test code at all?
bool looks_like_code(std::string_view text);

}  // namespace restcheck::agents
