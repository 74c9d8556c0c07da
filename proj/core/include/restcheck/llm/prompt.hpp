#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace restcheck::llm {

/// The seven agent prompts. `to_string` gives the short agent-facing name,
/// `store_key` the key used in the template store file.
enum class TemplateName {
  generate_test_case,
  generate_test_scenario,
  generate_system_scenario,
  check_parameter_type_correctness,
  check_status_code_coverage_by_script,
  check_status_code_coverage_by_execution_results,
  check_method_coverage,
};

inline constexpr TemplateName kAllTemplates[] = {
    TemplateName::generate_test_case,
    TemplateName::generate_test_scenario,
    TemplateName::generate_system_scenario,
    TemplateName::check_parameter_type_correctness,
    TemplateName::check_status_code_coverage_by_script,
    TemplateName::check_status_code_coverage_by_execution_results,
    TemplateName::check_method_coverage,
};

std::string_view to_string(TemplateName name) noexcept;
std::string_view store_key(TemplateName name) noexcept;
std::optional<TemplateName> parse_template_name(std::string_view text) noexcept;  // either form

/// Variables each shipped template is allowed to reference.
std::vector<std::string> declared_variables(TemplateName name);

struct PromptTemplate {
  std::string name;  // store key
  std::string system_text;
  std::string user_text;
  std::vector<std::string> variables;

  bool operator==(const PromptTemplate&) const = default;
};

/// Placeholders of the form {{name}} in order of first appearance.
std::vector<std::string> placeholders(std::string_view text);

/// Ordered collection of templates read from the YAML-style store file:
///
///   <key>:
///     system: |
///       <text indented four spaces>
///     user: |
///       <text>
///   <blank line>
///
/// serialize() writes exactly this layout, so parse/serialize round-trips
/// the shipped file byte for byte.
class TemplateStore {
 public:
  static TemplateStore parse(std::string_view text);
  static const TemplateStore& shipped();
  static std::string_view shipped_text() noexcept;

  std::string serialize() const;
  const PromptTemplate& get(TemplateName name) const;
  const PromptTemplate* find(std::string_view key) const;
  const std::vector<PromptTemplate>& templates() const noexcept { return templates_; }

 private:
  std::vector<PromptTemplate> templates_;
};

struct DualRolePrompt {
  std::string template_name;
  std::string system_message;
  std::string user_message;
  std::map<std::string, std::string> bindings_used;
  std::vector<std::string> warnings;

  /// Hex SHA-256 over template name, system and user message.
  std::string hash() const;

  bool operator==(const DualRolePrompt&) const = default;
};

using Bindings = std::map<std::string, std::string>;

/// Replaces every {{name}} in the user text with bindings[name]. Throws
/// Error(unbound_variable) naming the first missing variable; unused
/// bindings are reported in `warnings`.
DualRolePrompt render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

}  // namespace restcheck::llm
