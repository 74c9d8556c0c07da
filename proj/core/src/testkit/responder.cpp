#include "restcheck/testkit/responder.hpp"

#include "restcheck/testkit/fixtures.hpp"

namespace restcheck::testkit {

namespace {

std::string canonical_template(std::string_view name) {
  auto t = llm::parse_template_name(name);
  return t ? std::string(llm::store_key(*t)) : std::string(name);
}

bool matches(const ResponderRule& rule, const llm::DualRolePrompt& prompt) {
  if (canonical_template(rule.template_name) != canonical_template(prompt.template_name)) return false;
  for (const auto& [var, needle] : rule.binding_contains) {
    auto it = prompt.bindings_used.find(var);
    if (it == prompt.bindings_used.end() || it->second.find(needle) == std::string::npos) return false;
  }
  return true;
}

}  // namespace

ScriptedResponder::ScriptedResponder(std::vector<ResponderRule> rules, std::optional<std::string> fallback)
    : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

std::vector<ResponderRule> ScriptedResponder::load_rules(const std::filesystem::path& routes_file,
                                                         std::optional<std::string>* fallback) {
  Json routes;
  try {
    routes = Json::parse(read_file(routes_file));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, "routes file " + routes_file.string() + ": " + e.what());
  }
  const auto base = routes_file.parent_path();
  if (fallback != nullptr) {
    *fallback = routes.contains("fallback") && routes.at("fallback").is_string()
                    ? std::optional<std::string>(routes.at("fallback").get<std::string>())
                    : std::nullopt;
  }
  std::vector<ResponderRule> rules;
  for (const auto& r : routes.at("rules")) {
    ResponderRule rule;
    rule.template_name = r.at("template").get<std::string>();
    if (r.contains("when")) {
      for (const auto& [k, v] : r.at("when").items()) rule.binding_contains.emplace_back(k, v.get<std::string>());
    }
    if (r.contains("response_file")) {
      rule.response = read_file(base / r.at("response_file").get<std::string>());
    } else {
      rule.response = r.at("response").get<std::string>();
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::shared_ptr<ScriptedResponder> ScriptedResponder::from_file(const std::filesystem::path& routes_file) {
  std::optional<std::string> fallback;
  auto rules = load_rules(routes_file, &fallback);
  return std::make_shared<ScriptedResponder>(std::move(rules), std::move(fallback));
}

llm::Completion ScriptedResponder::send(const llm::DualRolePrompt& prompt, const llm::LlmConfig& config) {
  const ResponderRule* hit = nullptr;
  for (const auto& rule : rules_) {
    if (matches(rule, prompt)) {
      hit = &rule;
      break;
    }
  }
  {
    std::lock_guard lock(mutex_);
    calls_.push_back(prompt);
    if (hit == nullptr) unmatched_.push_back(prompt);
  }
  if (hit == nullptr && !fallback_) {
    throw llm::TransportError(llm::TransportError::Kind::unmatched,
                              "no scripted response for " + prompt.template_name + ":\n" + prompt.user_message);
  }
  llm::Completion c;
  c.text = hit != nullptr ? hit->response : *fallback_;
  c.model_name = config.model_name.empty() ? "scripted-responder" : config.model_name;
  return c;
}

std::vector<llm::DualRolePrompt> ScriptedResponder::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::vector<llm::DualRolePrompt> ScriptedResponder::unmatched() const {
  std::lock_guard lock(mutex_);
  return unmatched_;
}

void ScriptedResponder::clear_log() {
  std::lock_guard lock(mutex_);
  calls_.clear();
  unmatched_.clear();
}

}  // namespace restcheck::testkit
