#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "restcheck/llm/gateway.hpp"

namespace restcheck::testkit {

/// Routing rule: the template must match and every binding must contain its
/// substring. `template_name` accepts the store key or the short name.
struct ResponderRule {
  std::string template_name;
  std::vector<std::pair<std::string, std::string>> binding_contains;
  std::string response;
};

/// Offline chat endpoint. The first matching rule answers; unmatched calls
/// are logged and answered with the fallback text, or fail with
/// TransportError(unmatched) when there is none.
class ScriptedResponder : public llm::ChatTransport {
 public:
  explicit ScriptedResponder(std::vector<ResponderRule> rules, std::optional<std::string> fallback = std::nullopt);

  /// Routes file:
  ///
  ///   {"fallback": null,
  ///    "rules": [{"template": "generate_test_scenario_prompt",
  ///               "when": {"selected_apis": "GET /items"},
  ///               "response_file": "unit_scenarios_items.txt"}]}
  ///
  /// "response" may replace "response_file"; files resolve against the
  /// routes file's directory.
  static std::vector<ResponderRule> load_rules(const std::filesystem::path& routes_file,
                                               std::optional<std::string>* fallback = nullptr);
  static std::shared_ptr<ScriptedResponder> from_file(const std::filesystem::path& routes_file);

  llm::Completion send(const llm::DualRolePrompt& prompt, const llm::LlmConfig& config) override;

  std::vector<llm::DualRolePrompt> calls() const;
  std::vector<llm::DualRolePrompt> unmatched() const;
  void clear_log();

 private:
  std::vector<ResponderRule> rules_;
  std::optional<std::string> fallback_;
  mutable std::mutex mutex_;
  std::vector<llm::DualRolePrompt> calls_;
  std::vector<llm::DualRolePrompt> unmatched_;
};

}  // namespace restcheck::testkit
