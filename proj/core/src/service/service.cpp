#include "restcheck/service/service.hpp"

#include <algorithm>

#include "restcheck/metrics/project_inputs.hpp"
#include "restcheck/workflow/summary.hpp"

namespace restcheck::service {

namespace {

using workflow::Project;
using workflow::ReviewState;

[[noreturn]] void gate_error(const std::string& message, const std::string& entity, std::string_view state,
                             const char* required) {
  throw Error(ErrorCode::stage_gate, message,
              Json{{"entity", entity}, {"state", std::string(state)}, {"required", required}});
}

Json operation_refs_json(const Project& p, std::span<const std::string> op_ids) {
  Json arr = Json::array();
  for (const auto& id : op_ids) {
    const auto& op = p.operation(id);
    arr.push_back(Json{{"id", id}, {"key", op.key()}, {"detail", spec::render_operation_detail(op)}});
  }
  return arr;
}

Json project_view(const Project& p) {
  Json ops = Json::array();
  for (const auto& op : p.spec.operations) {
    ops.push_back(Json{{"id", p.operation_id(op)}, {"key", op.key()}, {"summary", op.summary}});
  }
  return Json{{"id", p.id},
              {"source", p.source},
              {"host_url", p.host_url},
              {"title", p.spec.title},
              {"version_tag", p.spec.version_tag},
              {"created_at", p.created_at},
              {"warnings", p.spec.warnings},
              {"operations", ops},
              {"summary", workflow::to_json(workflow::compute_summary(p, p.id))}};
}

std::vector<std::string> ids_of(const std::vector<const workflow::TestScenario*>& items) {
  std::vector<std::string> out;
  for (const auto* s : items) out.push_back(s->id);
  return out;
}

Json operation_view(const Project& p, const std::string& op_id) {
  const auto& op = p.operation(op_id);
  auto codes = spec::expected_status_codes(op);
  return Json{{"id", op_id},
              {"key", op.key()},
              {"method", std::string(spec::to_string(op.method))},
              {"path", op.path},
              {"operation_id", op.operation_id},
              {"summary", op.summary},
              {"description", op.description},
              {"detail", spec::render_operation_detail(op)},
              {"expected_status_codes",
               Json{{"codes", codes.codes}, {"has_default", codes.has_default}, {"has_range", codes.has_range}}},
              {"unit_scenarios", ids_of(p.unit_scenarios(op_id))},
              {"system_scenarios", ids_of(p.system_scenarios_of(op_id))},
              {"summary", workflow::to_json(workflow::compute_summary(p, op_id))}};
}

Json scenario_view(const Project& p, const workflow::TestScenario& s) {
  Json j = workflow::to_json(s);
  j["text"] = s.text();
  j["operations"] = operation_refs_json(p, s.operation_ids);
  Json scripts = Json::array();
  for (const auto* t : p.scripts_of(s.id)) scripts.push_back(t->id);
  j["scripts"] = scripts;
  j["summary"] = workflow::to_json(workflow::compute_summary(p, s.id));
  return j;
}

Json execution_view(const exec::ExecutionResult& e) {
  Json j = exec::to_json(e);
  j["all_passed"] = e.all_passed();
  return j;
}

Json script_view(const Project& p, const workflow::TestScript& t) {
  Json j = workflow::to_json(t);
  j["operations"] = operation_refs_json(p, t.operation_ids);
  if (const auto* sc = p.find_scenario(t.scenario_id)) j["scenario_text"] = sc->text();
  const auto* latest = p.latest_execution(t);
  j["latest_execution"] = latest != nullptr ? execution_view(*latest) : Json(nullptr);
  return j;
}

const workflow::EntityNode* find_node(const workflow::EntityNode& n, const std::string& id) {
  if (n.id == id) return &n;
  for (const auto& c : n.children) {
    if (const auto* hit = find_node(c, id)) return hit;
  }
  return nullptr;
}

Json node_progress(const Project& p, const std::string& node_id) {
  auto tree = workflow::build_tree(p);
  const auto* n = find_node(tree, node_id);
  if (n == nullptr) return nullptr;
  return Json{{"id", n->id},
              {"completion_percent", n->completion_percent},
              {"children_total", n->children_total},
              {"children_reviewed", n->children_reviewed}};
}

// Owner entity and tree node refreshed after a review of `entity_id`.
std::pair<std::string, std::string> owner_of(const Project& p, const std::string& entity_id) {
  if (const auto* s = p.find_scenario(entity_id)) {
    if (s->kind == agents::ScenarioKind::unit) return {s->operation_ids.front(), s->operation_ids.front() + "/unit"};
    return {p.id, p.id + "/system"};
  }
  const auto& t = p.script(entity_id);
  return {t.scenario_id, t.scenario_id + "/scripts"};
}

Json review_response(const Project& p, const std::string& result_id) {
  auto [owner, node] = owner_of(p, result_id);
  return Json{{"result_id", result_id},
              {"summary", workflow::to_json(workflow::compute_summary(p, owner))},
              {"node", node_progress(p, node)}};
}

std::optional<std::string> opt_field(const Json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  if (!body.at(key).is_string()) throw Error(ErrorCode::validation, std::string("'") + key + "' must be a string");
  return body.at(key).get<std::string>();
}

std::vector<std::string> string_list(const Json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return {};
  const auto& v = body.at(key);
  if (!v.is_array()) throw Error(ErrorCode::validation, std::string("'") + key + "' must be a list of ids");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw Error(ErrorCode::validation, std::string("'") + key + "' must be a list of ids");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::unit_scenarios: return "unit-scenarios";
    case TaskKind::system_scenarios: return "system-scenarios";
    case TaskKind::script: return "script";
    case TaskKind::syntax_check: return "syntax-check";
    case TaskKind::execute: return "execute";
    case TaskKind::data_type_check: return "data-type-check";
    case TaskKind::method_coverage_check: return "method-coverage-check";
    case TaskKind::status_code_check: return "status-code-check";
  }
  return "unknown";
}

ServiceConfig ServiceConfig::from_json(const Json& j, const std::string& default_runner_dir) {
  ServiceConfig c;
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, "service config must be an object");
  c.store = j.value("store", c.store);
  if (j.contains("llm")) c.llm = llm::LlmConfig::from_json(j.at("llm"));
  if (j.contains("runner")) c.runner = exec::RunnerConfig::from_json(j.at("runner"), default_runner_dir);
  c.workers = j.value("workers", c.workers);
  c.agent.prompt_char_budget = j.value("prompt-char-budget", c.agent.prompt_char_budget);
  if (c.workers < 1) throw Error(ErrorCode::invalid_config, "workers must be at least 1");
  c.llm.validate();
  if (c.runner) c.runner->validate();
  return c;
}

Service::Service(std::unique_ptr<workflow::ProjectStore> store, std::shared_ptr<llm::ChatTransport> transport,
                 llm::LlmConfig llm, std::optional<exec::RunnerConfig> runner, workflow::Clock clock,
                 agents::AgentOptions agent_options)
    : store_(std::move(store)),
      gateway_(std::move(llm), std::move(transport)),
      runner_(std::move(runner)),
      clock_(std::move(clock)),
      agent_options_(agent_options) {
  if (runner_) runner_->validate();
}

Service::~Service() = default;

std::string Service::project_of(std::string_view entity_id) {
  return std::string(entity_id.substr(0, entity_id.find('.')));
}

Service::Locks& Service::locks(const std::string& project_id) {
  std::lock_guard lock(registry_mutex_);
  auto& slot = locks_[project_id];
  if (!slot) slot = std::make_unique<Locks>();
  return *slot;
}

workflow::Project Service::load(const std::string& project_id) { return store_->load(project_id); }

void Service::save(const workflow::Project& p) { store_->save(p); }

agents::Agents Service::agents_for(const std::string& project_id) {
  // Completions are persisted as soon as they arrive, before any parsing.
  auto record = [this, project_id](const llm::CompletionRecord& rec) {
    std::unique_lock lock(locks(project_id).rw);
    auto p = load(project_id);
    auto id = workflow::record_completion(p, rec);
    save(p);
    return id;
  };
  return agents::Agents(gateway_, llm::TemplateStore::shipped(), agent_options_, record);
}

Json Service::create_project(const std::string& source, const std::string& host_url) {
  auto spec = spec::load_spec(source);
  std::lock_guard lock(registry_mutex_);
  int next = 1;
  for (const auto& id : store_->list()) {
    if (id.size() > 1 && id[0] == 'p' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) {
      next = std::max(next, std::stoi(id.substr(1)) + 1);
    }
  }
  auto p = workflow::new_project("p" + std::to_string(next), std::move(spec), host_url, clock_);
  save(p);
  return project_view(p);
}

Json Service::import_project(const Json& bundle) {
  auto p = workflow::from_bundle(bundle);
  std::lock_guard lock(registry_mutex_);
  auto ids = store_->list();
  if (std::find(ids.begin(), ids.end(), p.id) != ids.end()) {
    throw Error(ErrorCode::validation, "project " + p.id + " already exists", Json{{"id", p.id}});
  }
  save(p);
  return project_view(p);
}

Json Service::list_projects() {
  Json arr = Json::array();
  for (const auto& id : store_->list()) {
    std::shared_lock lock(locks(id).rw);
    auto p = load(id);
    arr.push_back(Json{{"id", p.id}, {"title", p.spec.title}, {"source", p.source}, {"created_at", p.created_at}});
  }
  return arr;
}

Json Service::project(const std::string& project_id) {
  std::shared_lock lock(locks(project_id).rw);
  return project_view(load(project_id));
}

Json Service::tree(const std::string& project_id) {
  std::shared_lock lock(locks(project_id).rw);
  return workflow::to_json(workflow::build_tree(load(project_id)));
}

Json Service::entities(const std::string& project_id) {
  std::shared_lock lock(locks(project_id).rw);
  auto p = load(project_id);
  Json ops = Json::array();
  for (const auto& id : p.operation_ids()) ops.push_back(operation_view(p, id));
  Json scenarios = Json::array();
  for (const auto& s : p.scenarios) scenarios.push_back(scenario_view(p, s));
  Json scripts = Json::array();
  for (const auto& t : p.scripts) scripts.push_back(script_view(p, t));
  Json executions = Json::array();
  for (const auto& e : p.executions) executions.push_back(execution_view(e));
  return Json{{"operations", ops}, {"scenarios", scenarios}, {"scripts", scripts}, {"executions", executions}};
}

Json Service::export_bundle(const std::string& project_id) {
  std::shared_lock lock(locks(project_id).rw);
  return workflow::to_bundle(load(project_id));
}

Json Service::operation(const std::string& op_id) {
  const auto pid = project_of(op_id);
  std::shared_lock lock(locks(pid).rw);
  return operation_view(load(pid), op_id);
}

Json Service::scenario(const std::string& scenario_id) {
  const auto pid = project_of(scenario_id);
  std::shared_lock lock(locks(pid).rw);
  auto p = load(pid);
  return scenario_view(p, p.scenario(scenario_id));
}

Json Service::script(const std::string& script_id) {
  const auto pid = project_of(script_id);
  std::shared_lock lock(locks(pid).rw);
  auto p = load(pid);
  return script_view(p, p.script(script_id));
}

Json Service::execution(const std::string& execution_id) {
  const auto pid = project_of(execution_id);
  std::shared_lock lock(locks(pid).rw);
  auto p = load(pid);
  const auto* e = p.find_execution(execution_id);
  if (e == nullptr) throw Error(ErrorCode::not_found, "execution " + execution_id + " not found");
  return execution_view(*e);
}

Json Service::summary(const std::string& entity_id) {
  const auto pid = project_of(entity_id);
  std::shared_lock lock(locks(pid).rw);
  return workflow::to_json(workflow::compute_summary(load(pid), entity_id));
}

void Service::check_gate_locked(const workflow::Project& p, const TaskRequest& r) const {
  auto need_runner = [&] {
    if (!runner_) throw Error(ErrorCode::runner_config, "no test runner is configured");
  };
  switch (r.kind) {
    case TaskKind::unit_scenarios:
      (void)p.operation(r.target);
      return;
    case TaskKind::system_scenarios:
      if (r.target != p.id) throw Error(ErrorCode::not_found, "project " + r.target + " not found");
      for (const auto& id : r.operation_ids) (void)p.operation(id);
      return;
    case TaskKind::script: {
      const auto& s = p.scenario(r.target);
      if (s.state != ReviewState::accepted) {
        gate_error("scenario " + s.id + " is " + std::string(workflow::to_string(s.state)) +
                       "; script generation needs an accepted scenario",
                   s.id, workflow::to_string(s.state), "accepted scenario");
      }
      return;
    }
    case TaskKind::syntax_check:
      (void)p.script(r.target);
      need_runner();
      return;
    case TaskKind::execute: {
      const auto& t = p.script(r.target);
      if (t.state != ReviewState::accepted) {
        gate_error("script " + t.id + " is " + std::string(workflow::to_string(t.state)) +
                       "; execution needs an accepted script",
                   t.id, workflow::to_string(t.state), "accepted script");
      }
      if (!t.syntax_valid()) {
        gate_error("script " + t.id + " has not passed the syntax check", t.id,
                   t.syntax ? exec::to_string(*t.syntax) : "unchecked", "valid syntax");
      }
      need_runner();
      return;
    }
    case TaskKind::data_type_check:
    case TaskKind::method_coverage_check:
    case TaskKind::status_code_check: {
      const auto& t = p.script(r.target);
      if (t.state == ReviewState::rejected) {
        gate_error("script " + t.id + " is rejected", t.id, "rejected", "non-rejected script");
      }
      if (r.kind == TaskKind::status_code_check && p.latest_execution(t) == nullptr) {
        gate_error("script " + t.id + " has not been executed; the status-code check follows execution", t.id,
                   workflow::to_string(t.state), "executed script");
      }
      return;
    }
  }
}

void Service::check_gate(const TaskRequest& request) {
  const auto pid = project_of(request.target);
  std::shared_lock lock(locks(pid).rw);
  check_gate_locked(load(pid), request);
}

Json Service::run_task(const TaskRequest& r) {
  switch (r.kind) {
    case TaskKind::unit_scenarios: return run_unit_scenarios(r);
    case TaskKind::system_scenarios: return run_system_scenarios(r);
    case TaskKind::script: return run_script(r);
    case TaskKind::syntax_check: return run_syntax_check(r);
    case TaskKind::execute: return run_execute(r);
    case TaskKind::data_type_check:
    case TaskKind::method_coverage_check:
    case TaskKind::status_code_check: return run_check(r);
  }
  throw Error(ErrorCode::internal, "unknown task kind");
}

std::optional<exec::SyntaxVerdict> Service::syntax_of(std::string_view text) {
  if (!runner_) return std::nullopt;
  exec::Executor executor(*runner_);
  return executor.syntax_check(text).verdict;
}

Json Service::run_unit_scenarios(const TaskRequest& r) {
  const auto pid = project_of(r.target);
  agents::OperationRef ref;
  {
    std::shared_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, r);
    ref = p.operation_refs(std::span(&r.target, 1)).front();
  }
  auto gen = agents_for(pid).generate_unit_scenarios(ref);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  check_gate_locked(p, r);
  auto ids = workflow::admit_drafts(p, gen.drafts, std::span(&r.target, 1), gen.completion_id, clock_);
  save(p);
  return Json{{"scenario_ids", ids}, {"completion_id", gen.completion_id}, {"warnings", gen.warnings}};
}

Json Service::run_system_scenarios(const TaskRequest& r) {
  const auto pid = r.target;
  std::vector<std::string> op_ids = r.operation_ids;
  std::vector<agents::OperationRef> refs;
  {
    std::shared_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, r);
    if (op_ids.empty()) op_ids = p.operation_ids();
    refs = p.operation_refs(op_ids);
  }
  auto gen = agents_for(pid).generate_system_scenarios(refs);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  check_gate_locked(p, r);
  auto ids = workflow::admit_drafts(p, gen.drafts, op_ids, gen.completion_id, clock_);
  save(p);
  return Json{{"scenario_ids", ids}, {"completion_id", gen.completion_id}, {"warnings", gen.warnings}};
}

Json Service::run_script(const TaskRequest& r) {
  const auto pid = project_of(r.target);
  std::string text;
  std::string host;
  std::vector<std::string> op_ids;
  std::vector<agents::OperationRef> refs;
  {
    std::shared_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, r);
    const auto& s = p.scenario(r.target);
    text = s.text();
    op_ids = s.operation_ids;
    refs = p.operation_refs(op_ids);
    host = p.host_url;
  }
  auto gen = agents_for(pid).generate_test_script(text, refs, host);
  auto verdict = syntax_of(gen.script_text);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  check_gate_locked(p, r);
  auto tid = workflow::admit_script(p, r.target, gen, op_ids, clock_);
  auto& t = p.script(tid);
  t.original_syntax = verdict;
  t.syntax = verdict;
  save(p);
  return Json{{"script_id", tid},
              {"completion_id", gen.completion_id},
              {"needs_review", gen.needs_review},
              {"warnings", gen.warnings},
              {"syntax", verdict ? Json(std::string(exec::to_string(*verdict))) : Json(nullptr)}};
}

Json Service::run_syntax_check(const TaskRequest& r) {
  const auto pid = project_of(r.target);
  std::string text;
  {
    std::shared_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, r);
    text = p.script(r.target).text;
  }
  exec::Executor executor(*runner_);
  auto check = executor.syntax_check(text);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  auto& t = p.script(r.target);
  // The text may have been edited while the check ran.
  if (t.text == text) t.syntax = check.verdict;
  if (t.original_text && *t.original_text == text && !t.original_syntax) t.original_syntax = check.verdict;
  save(p);
  return Json{{"script_id", t.id}, {"syntax", std::string(exec::to_string(check.verdict))}, {"output", check.output}};
}

Json Service::run_execute(const TaskRequest& r) {
  const auto pid = project_of(r.target);
  std::lock_guard serial(locks(pid).exec);
  std::string text;
  std::string host;
  std::vector<spec::ApiOperation> ops;
  {
    std::shared_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, r);
    const auto& t = p.script(r.target);
    text = t.text;
    host = t.host_url;
    ops = p.spec.operations;
  }
  exec::Executor executor(*runner_);
  auto result = executor.execute(text, ops, host);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  auto eid = workflow::admit_execution(p, r.target, std::move(result));
  save(p);
  return execution_view(*p.find_execution(eid));
}

Json Service::run_check(const TaskRequest& r) {
  const auto pid = project_of(r.target);
  std::string scenario_text;
  std::string script_text;
  std::string execution_text;
  bool passed = false;
  std::vector<agents::OperationRef> refs;
  {
    std::shared_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, r);
    const auto& t = p.script(r.target);
    script_text = t.text;
    if (const auto* s = p.find_scenario(t.scenario_id)) scenario_text = s->text();
    refs = p.operation_refs(t.operation_ids);
    if (const auto* e = p.latest_execution(t)) {
      passed = e->all_passed();
      execution_text = exec::execution_summary_text(*e);
    }
  }
  auto agent = agents_for(pid);
  Json report;
  std::function<void(workflow::TestScript&)> store_report;
  if (r.kind == TaskKind::data_type_check) {
    auto res = agent.check_data_types(scenario_text, refs, script_text);
    report = agents::to_json(res.report);
    store_report = [rep = std::move(res.report)](workflow::TestScript& t) { t.data_type_report = rep; };
  } else if (r.kind == TaskKind::method_coverage_check) {
    auto res = agent.check_method_coverage(scenario_text, refs, script_text);
    report = agents::to_json(res.report);
    store_report = [rep = std::move(res.report)](workflow::TestScript& t) { t.method_coverage_report = rep; };
  } else {
    auto res = passed ? agent.check_status_codes_static(scenario_text, refs, script_text)
                      : agent.check_status_codes_dynamic(scenario_text, refs, execution_text);
    report = agents::to_json(res.report);
    store_report = [rep = std::move(res.report)](workflow::TestScript& t) { t.status_code_report = rep; };
  }
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  check_gate_locked(p, r);
  auto& t = p.script(r.target);
  store_report(t);
  t.updated_at = clock_();
  save(p);
  return Json{{"script_id", t.id}, {"report", report}};
}

Json Service::review(const std::string& entity_id, const Json& body) {
  if (!body.is_object() || !body.contains("verb") || !body.at("verb").is_string()) {
    throw Error(ErrorCode::validation, "review body needs a 'verb'");
  }
  workflow::ReviewAction a;
  a.target_id = entity_id;
  a.verb = workflow::parse_verb(body.at("verb").get<std::string>());
  if (a.verb == workflow::Verb::add) throw Error(ErrorCode::validation, "use POST /scenarios or /scripts to add");
  a.name = opt_field(body, "name");
  a.description = opt_field(body, "description");
  a.text = opt_field(body, "text");
  const auto pid = project_of(entity_id);
  std::string result;
  bool script_edit = false;
  {
    std::unique_lock lock(locks(pid).rw);
    auto p = load(pid);
    script_edit = p.find_script(entity_id) != nullptr && a.verb == workflow::Verb::edit;
    result = workflow::apply_review(p, a, clock_);
    save(p);
  }
  if (script_edit && runner_) run_syntax_check(TaskRequest{TaskKind::syntax_check, result, {}});
  std::shared_lock lock(locks(pid).rw);
  return review_response(load(pid), result);
}

Json Service::add_scenario(const Json& body) {
  if (!body.is_object()) throw Error(ErrorCode::validation, "body must be an object");
  auto target = opt_field(body, "target_id");
  if (!target) throw Error(ErrorCode::validation, "'target_id' names the owning operation or project");
  workflow::ReviewAction a;
  a.target_id = *target;
  a.verb = workflow::Verb::add;
  a.name = opt_field(body, "name");
  a.description = opt_field(body, "description");
  a.operation_ids = string_list(body, "operation_ids");
  const auto pid = project_of(*target);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  if (p.find_operation(*target) == nullptr && *target != p.id) {
    throw Error(ErrorCode::not_found, "owner " + *target + " not found");
  }
  auto result = workflow::apply_review(p, a, clock_);
  save(p);
  return review_response(p, result);
}

Json Service::add_script(const Json& body) {
  if (!body.is_object()) throw Error(ErrorCode::validation, "body must be an object");
  auto sid = opt_field(body, "scenario_id");
  if (!sid) throw Error(ErrorCode::validation, "'scenario_id' is required");
  workflow::ReviewAction a;
  a.target_id = *sid;
  a.verb = workflow::Verb::add;
  a.text = opt_field(body, "text");
  a.operation_ids = string_list(body, "operation_ids");
  const auto pid = project_of(*sid);
  std::string result;
  {
    std::unique_lock lock(locks(pid).rw);
    auto p = load(pid);
    check_gate_locked(p, TaskRequest{TaskKind::script, *sid, {}});
    result = workflow::apply_review(p, a, clock_);
    save(p);
  }
  if (runner_) run_syntax_check(TaskRequest{TaskKind::syntax_check, result, {}});
  std::shared_lock lock(locks(pid).rw);
  return review_response(load(pid), result);
}

Json Service::set_data_type_verdict(const std::string& script_id, const Json& body) {
  if (!body.is_object() || !body.contains("valid") || !body.at("valid").is_boolean()) {
    throw Error(ErrorCode::validation, "body needs a boolean 'valid'");
  }
  const auto pid = project_of(script_id);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  auto& t = p.script(script_id);
  t.data_type_verdict = body.at("valid").get<bool>();
  t.updated_at = clock_();
  save(p);
  return script_view(p, t);
}

Json Service::metrics(const std::string& scope) {
  const auto pid = project_of(scope);
  std::unique_lock lock(locks(pid).rw);
  auto p = load(pid);
  if (scope != p.id) (void)p.operation(scope);
  p.metric_records = metrics::evaluate_project(p, clock_());
  save(p);
  std::vector<metrics::MetricRecord> selected;
  int undefined = 0;
  for (const auto& m : p.metric_records) {
    if (scope != p.id && m.scope != scope) continue;
    if (!m.value) ++undefined;
    selected.push_back(m);
  }
  return Json{{"scope", scope},
              {"records", metrics::to_json(std::span<const metrics::MetricRecord>(selected))},
              {"undefined", undefined},
              {"summary", workflow::to_json(workflow::compute_summary(p, scope))}};
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::validation:
    case ErrorCode::invalid_config:
    case ErrorCode::unbound_variable: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::stage_gate:
    case ErrorCode::illegal_transition:
    case ErrorCode::version_mismatch: return 409;
    case ErrorCode::spec_unreachable:
    case ErrorCode::spec_not_json:
    case ErrorCode::spec_no_paths:
    case ErrorCode::spec_no_operations:
    case ErrorCode::dangling_ref:
    case ErrorCode::prompt_too_large:
    case ErrorCode::undefined_metric:
    case ErrorCode::incomplete_inputs:
    case ErrorCode::precondition: return 422;
    case ErrorCode::llm_timeout:
    case ErrorCode::llm_http_status:
    case ErrorCode::llm_empty_response:
    case ErrorCode::llm_transport:
    case ErrorCode::llm_unmatched:
    case ErrorCode::empty_scenario_list:
    case ErrorCode::report_parse:
    case ErrorCode::report_shape: return 502;
    case ErrorCode::store_unavailable: return 503;
    case ErrorCode::template_store:
    case ErrorCode::runner_config:
    case ErrorCode::runner_failure:
    case ErrorCode::internal: return 500;
  }
  return 500;
}

Json error_envelope(const Error& e) {
  return Json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", e.details()}};
}

}  // namespace restcheck::service
