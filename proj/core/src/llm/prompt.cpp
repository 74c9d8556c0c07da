#include "restcheck/llm/prompt.hpp"

#include <algorithm>

#include "restcheck/digest.hpp"
#include "restcheck/error.hpp"

namespace restcheck::llm {

namespace {

constexpr std::string_view kIndent = "    ";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

[[noreturn]] void store_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::template_store, "template store line " + std::to_string(line + 1) + ": " + what);
}

// Reads one "  <role>: |" header plus its literal block starting at `i`.
std::string read_block(const std::vector<std::string_view>& lines, std::size_t& i, std::string_view role) {
  const std::string header = "  " + std::string(role) + ": |";
  if (i >= lines.size() || lines[i] != header) store_error(i, "expected '" + header + "'");
  ++i;
  std::vector<std::string_view> body;
  while (i < lines.size()) {
    auto line = lines[i];
    if (line.starts_with(kIndent)) {
      body.push_back(line.substr(kIndent.size()));
      ++i;
      continue;
    }
    if (line.empty()) {
      // A blank line belongs to the block only if indented content follows.
      auto j = i;
      while (j < lines.size() && lines[j].empty()) ++j;
      if (j < lines.size() && lines[j].starts_with(kIndent)) {
        for (; i < j; ++i) body.push_back({});
        continue;
      }
    }
    break;
  }
  if (body.empty()) store_error(i, "empty " + std::string(role) + " block");
  std::string text;
  for (auto l : body) {
    text += l;
    text += '\n';
  }
  return text;
}

void write_block(std::string& out, std::string_view role, std::string_view text) {
  out += "  ";
  out += role;
  out += ": |\n";
  auto body = text;
  if (body.ends_with('\n')) body.remove_suffix(1);
  for (auto line : split_lines(body)) {
    if (!line.empty()) out += kIndent;
    out += line;
    out += '\n';
  }
}

}  // namespace

std::string_view to_string(TemplateName name) noexcept {
  switch (name) {
    case TemplateName::generate_test_case: return "generate_test_case";
    case TemplateName::generate_test_scenario: return "generate_test_scenario";
    case TemplateName::generate_system_scenario: return "generate_system_scenario";
    case TemplateName::check_parameter_type_correctness: return "check_parameter_type_correctness";
    case TemplateName::check_status_code_coverage_by_script: return "check_status_code_coverage_by_script";
    case TemplateName::check_status_code_coverage_by_execution_results:
      return "check_status_code_coverage_by_execution_results";
    case TemplateName::check_method_coverage: return "check_method_coverage";
  }
  return "";
}

std::string_view store_key(TemplateName name) noexcept {
  switch (name) {
    case TemplateName::generate_test_case: return "generate_test_case_prompt";
    case TemplateName::generate_test_scenario: return "generate_test_scenario_prompt";
    case TemplateName::generate_system_scenario: return "generate_system_scenario_prompt";
    default: return to_string(name);
  }
}

std::optional<TemplateName> parse_template_name(std::string_view text) noexcept {
  for (auto name : kAllTemplates) {
    if (text == to_string(name) || text == store_key(name)) return name;
  }
  return std::nullopt;
}

std::vector<std::string> declared_variables(TemplateName name) {
  switch (name) {
    case TemplateName::generate_test_case: return {"selected_apis", "server_host", "selected_scenarios"};
    case TemplateName::generate_test_scenario:
    case TemplateName::generate_system_scenario: return {"selected_apis"};
    case TemplateName::check_parameter_type_correctness:
    case TemplateName::check_status_code_coverage_by_script:
    case TemplateName::check_method_coverage: return {"selected_apis", "scenario", "generated_script"};
    case TemplateName::check_status_code_coverage_by_execution_results:
      return {"selected_apis", "scenario", "execution_result"};
  }
  return {};
}

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    auto close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) break;
    std::string name(text.substr(pos + 2, close - pos - 2));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    pos = close + 2;
  }
  return out;
}

TemplateStore TemplateStore::parse(std::string_view text) {
  TemplateStore store;
  auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size()) {
    auto line = lines[i];
    if (line.empty()) {
      ++i;
      continue;
    }
    if (line.front() == ' ' || !line.ends_with(':')) store_error(i, "expected '<template name>:'");
    PromptTemplate tmpl;
    tmpl.name = std::string(line.substr(0, line.size() - 1));
    if (store.find(tmpl.name) != nullptr) store_error(i, "duplicate template '" + tmpl.name + "'");
    ++i;
    tmpl.system_text = read_block(lines, i, "system");
    tmpl.user_text = read_block(lines, i, "user");

    auto used = placeholders(tmpl.user_text);
    if (auto known = parse_template_name(tmpl.name)) {
      tmpl.variables = declared_variables(*known);
      for (const auto& p : used) {
        if (std::find(tmpl.variables.begin(), tmpl.variables.end(), p) == tmpl.variables.end()) {
          throw Error(ErrorCode::template_store,
                      "template '" + tmpl.name + "' uses undeclared variable '" + p + "'");
        }
      }
    } else {
      tmpl.variables = used;
    }
    store.templates_.push_back(std::move(tmpl));
  }
  return store;
}

const TemplateStore& TemplateStore::shipped() {
  static const TemplateStore store = [] {
    auto s = parse(shipped_text());
    for (auto name : kAllTemplates) (void)s.get(name);
    return s;
  }();
  return store;
}

std::string TemplateStore::serialize() const {
  std::string out;
  for (const auto& t : templates_) {
    out += t.name;
    out += ":\n";
    write_block(out, "system", t.system_text);
    write_block(out, "user", t.user_text);
    out += '\n';
  }
  return out;
}

const PromptTemplate* TemplateStore::find(std::string_view key) const {
  auto it = std::find_if(templates_.begin(), templates_.end(), [&](const auto& t) { return t.name == key; });
  return it == templates_.end() ? nullptr : &*it;
}

const PromptTemplate& TemplateStore::get(TemplateName name) const {
  if (const auto* t = find(store_key(name))) return *t;
  throw Error(ErrorCode::template_store, "template store lacks '" + std::string(store_key(name)) + "'");
}

std::string DualRolePrompt::hash() const {
  std::string material = template_name;
  material += '\0';
  material += system_message;
  material += '\0';
  material += user_message;
  return sha256_hex(material);
}

DualRolePrompt render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  DualRolePrompt prompt;
  prompt.template_name = tmpl.name;
  prompt.system_message = tmpl.system_text;

  const std::string_view text = tmpl.user_text;
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    std::string name(text.substr(open + 2, close - open - 2));
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw Error(ErrorCode::unbound_variable, "unbound variable " + name,
                  Json{{"variable", name}, {"template", tmpl.name}});
    }
    out.append(it->second);
    prompt.bindings_used[name] = it->second;
    pos = close + 2;
  }
  for (const auto& [name, _] : bindings) {
    if (!prompt.bindings_used.contains(name)) {
      prompt.warnings.push_back("binding '" + name + "' is not used by template '" + tmpl.name + "'");
    }
  }
  prompt.user_message = std::move(out);
  return prompt;
}

}  // namespace restcheck::llm
