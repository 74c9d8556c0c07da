#include "restcheck/agents/agents.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace restcheck::agents {

namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool path_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '/' || c == '{' || c == '}' || c == '_' || c == '-';
}

std::vector<std::string> keys_of(std::span<const OperationRef> ops) {
  std::vector<std::string> keys;
  keys.reserve(ops.size());
  for (const auto& op : ops) keys.push_back(op.key);
  return keys;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept { return kind == ScenarioKind::unit ? "unit" : "system"; }

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "unit") return ScenarioKind::unit;
  if (text == "system") return ScenarioKind::system;
  throw Error(ErrorCode::validation, "unknown scenario kind '" + std::string(text) + "'");
}

ScenarioParse parse_scenario_list(std::string_view text) {
  static const std::regex item_re(R"(^\s*(\d+)\.\s*Scenario Name:\s*(.*)$)");
  static const std::regex desc_re(R"(^\s*Scenario Description:\s*(.*)$)");
  ScenarioParse out;
  std::vector<std::string> desc_lines;
  bool open = false;

  auto close = [&] {
    if (!open) return;
    auto& d = out.drafts.back();
    std::string joined;
    for (const auto& line : desc_lines) {
      if (!joined.empty()) joined += '\n';
      joined += line;
    }
    d.description = std::move(joined);
    desc_lines.clear();
    open = false;
    if (d.name.empty()) {
      out.warnings.push_back("item " + std::to_string(d.ordinal) + " has an empty name; dropped");
      out.drafts.pop_back();
    }
  };

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, item_re)) {
      close();
      ScenarioDraft d;
      d.ordinal = static_cast<int>(out.drafts.size()) + 1;
      const int stated = std::stoi(m[1].str());
      if (stated != d.ordinal) {
        out.warnings.push_back("item numbered " + std::to_string(stated) + " renumbered to " +
                               std::to_string(d.ordinal));
      }
      d.name = trimmed(m[2].str());
      out.drafts.push_back(std::move(d));
      open = true;
      continue;
    }
    if (!open) continue;
    if (std::regex_match(line, m, desc_re)) {
      auto first = trimmed(m[1].str());
      if (!first.empty()) desc_lines.push_back(std::move(first));
      continue;
    }
    auto t = trimmed(line);
    if (!t.empty()) desc_lines.push_back(std::move(t));
  }
  close();
  return out;
}

std::string serialize_scenario_list(std::span<const ScenarioDraft> drafts) {
  std::string out;
  int n = 0;
  for (const auto& d : drafts) {
    if (n > 0) out += '\n';
    out += std::to_string(++n) + ". Scenario Name: " + d.name + "\n";
    out += "   Scenario Description: ";
    std::istringstream in(d.description);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!first) out += "   ";
      out += line + "\n";
      first = false;
    }
    if (first) out += "\n";
  }
  return out;
}

std::string scenario_prompt_text(std::string_view name, std::string_view description) {
  return "Scenario Name: " + std::string(name) + "\nScenario Description: " + std::string(description);
}

OperationMentions find_operation_mentions(std::string_view description, std::span<const OperationRef> ops) {
  OperationMentions out;
  const auto hay = lower(description);
  for (const auto& op : ops) {
    const auto needle = lower(op.key);
    bool exact = false;
    bool prefix_only = false;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
      if (pos > 0 && std::isalpha(static_cast<unsigned char>(hay[pos - 1]))) continue;
      const auto end = pos + needle.size();
      if (end < hay.size() && path_char(hay[end])) {
        prefix_only = true;
      } else {
        exact = true;
        break;
      }
    }
    if (exact) {
      out.matched.push_back(op.key);
    } else if (prefix_only) {
      out.ambiguous.push_back(op.key);
    }
  }
  return out;
}

std::string join_details(std::span<const OperationRef> ops) {
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i > 0) out += '\n';
    out += ops[i].detail;
  }
  return out;
}

bool looks_like_code(std::string_view text) {
  static const std::regex code_re(R"((^|\n)\s*(import |from \S+ import |def |class |assert |@pytest))");
  return std::regex_search(text.begin(), text.end(), code_re);
}

Agents::Agents(llm::LlmGateway& gateway, const llm::TemplateStore& templates, AgentOptions options,
               RecordCompletion record)
    : gateway_(gateway), templates_(templates), options_(options), record_(std::move(record)) {}

Agents::Exchange Agents::exchange(llm::TemplateName name, const llm::Bindings& bindings) {
  auto prompt = llm::render_prompt(templates_.get(name), bindings);
  const auto size = prompt.system_message.size() + prompt.user_message.size();
  if (size > options_.prompt_char_budget) {
    throw Error(ErrorCode::prompt_too_large,
                "rendered prompt has " + std::to_string(size) + " characters, budget is " +
                    std::to_string(options_.prompt_char_budget) + "; select a smaller subset of operations",
                Json{{"chars", size}, {"budget", options_.prompt_char_budget}});
  }
  auto completion = gateway_.complete(prompt);
  Exchange ex{completion.text, {}};
  if (record_) ex.record_id = record_(llm::make_record(prompt, completion));
  return ex;
}

ScenarioGeneration Agents::scenarios(llm::TemplateName name, std::span<const OperationRef> ops, ScenarioKind kind) {
  if (ops.empty()) throw Error(ErrorCode::precondition, "no operations selected");
  auto ex = exchange(name, {{"selected_apis", join_details(ops)}});
  auto parsed = parse_scenario_list(ex.text);
  if (parsed.drafts.empty()) {
    throw Error(ErrorCode::empty_scenario_list, "empty scenario list",
                Json{{"raw", ex.text}, {"completion_id", ex.record_id}});
  }
  ScenarioGeneration gen{ex.text, ex.record_id, std::move(parsed.drafts), std::move(parsed.warnings)};
  for (auto& d : gen.drafts) {
    d.kind = kind;
    if (kind != ScenarioKind::system) continue;
    auto mentions = find_operation_mentions(d.name + "\n" + d.description, ops);
    d.referenced_operations = mentions.matched;
    for (const auto& a : mentions.ambiguous) d.flags.push_back("ambiguous operation mention: " + a);
    if (d.referenced_operations.size() < 2) d.flags.push_back("description names fewer than two operations");
  }
  return gen;
}

ScenarioGeneration Agents::generate_unit_scenarios(const OperationRef& op) {
  return scenarios(llm::TemplateName::generate_test_scenario, std::span(&op, 1), ScenarioKind::unit);
}

ScenarioGeneration Agents::generate_system_scenarios(std::span<const OperationRef> ops) {
  return scenarios(llm::TemplateName::generate_system_scenario, ops, ScenarioKind::system);
}

GeneratedScript Agents::generate_test_script(std::string_view scenario_text, std::span<const OperationRef> ops,
                                             std::string_view host_url) {
  if (ops.empty()) throw Error(ErrorCode::precondition, "no operations selected");
  auto ex = exchange(llm::TemplateName::generate_test_case, {{"selected_apis", join_details(ops)},
                                                             {"server_host", std::string(host_url)},
                                                             {"selected_scenarios", std::string(scenario_text)}});
  GeneratedScript s;
  s.raw_completion = ex.text;
  s.completion_id = ex.record_id;
  s.script_text = strip_code_fences(ex.text);
  s.operations_in_scope = keys_of(ops);
  s.host_url = std::string(host_url);
  if (trimmed(s.script_text).empty()) {
    throw Error(ErrorCode::llm_empty_response, "completion holds no script",
                Json{{"raw", ex.text}, {"completion_id", ex.record_id}});
  }
  if (!looks_like_code(s.script_text)) {
    s.needs_review = true;
    s.warnings.emplace_back("completion does not look like test code");
  }
  return s;
}

CheckResult<DataTypeReport> Agents::check_data_types(std::string_view scenario_text, std::span<const OperationRef> ops,
                                                     std::string_view script_text) {
  auto ex = exchange(llm::TemplateName::check_parameter_type_correctness,
                     {{"selected_apis", join_details(ops)},
                      {"scenario", std::string(scenario_text)},
                      {"generated_script", std::string(script_text)}});
  return {ex.text, parse_data_type_report(ex.text)};
}

CheckResult<MethodCoverageReport> Agents::check_method_coverage(std::string_view scenario_text,
                                                                std::span<const OperationRef> ops,
                                                                std::string_view script_text) {
  auto ex = exchange(llm::TemplateName::check_method_coverage, {{"selected_apis", join_details(ops)},
                                                                {"scenario", std::string(scenario_text)},
                                                                {"generated_script", std::string(script_text)}});
  return {ex.text, parse_method_coverage_report(ex.text)};
}

CheckResult<StatusCodeReport> Agents::check_status_codes_static(std::string_view scenario_text,
                                                                std::span<const OperationRef> ops,
                                                                std::string_view script_text) {
  auto ex = exchange(llm::TemplateName::check_status_code_coverage_by_script,
                     {{"selected_apis", join_details(ops)},
                      {"scenario", std::string(scenario_text)},
                      {"generated_script", std::string(script_text)}});
  return {ex.text, parse_status_code_report(ex.text, StatusCodeMode::static_script)};
}

CheckResult<StatusCodeReport> Agents::check_status_codes_dynamic(std::string_view scenario_text,
                                                                 std::span<const OperationRef> ops,
                                                                 std::string_view execution_result) {
  auto ex = exchange(llm::TemplateName::check_status_code_coverage_by_execution_results,
                     {{"selected_apis", join_details(ops)},
                      {"scenario", std::string(scenario_text)},
                      {"execution_result", std::string(execution_result)}});
  return {ex.text, parse_status_code_report(ex.text, StatusCodeMode::dynamic_execution)};
}

}  // namespace restcheck::agents
