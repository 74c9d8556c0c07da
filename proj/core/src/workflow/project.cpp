#include "restcheck/workflow/project.hpp"

#include <algorithm>
#include <cctype>

namespace restcheck::workflow {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

[[noreturn]] void illegal(Verb verb, std::string_view what, ReviewState state) {
  throw Error(ErrorCode::illegal_transition,
              "cannot " + std::string(to_string(verb)) + " a " + std::string(to_string(state)) + " " + std::string(what),
              Json{{"state", to_string(state)}, {"verb", to_string(verb)}});
}

template <typename Entity>
void transition(Entity& e, Verb verb, std::string_view what) {
  switch (verb) {
    case Verb::accept:
      if (e.state == ReviewState::rejected) illegal(verb, what, e.state);
      e.state = ReviewState::accepted;
      break;
    case Verb::reject:
      if (e.state == ReviewState::rejected) illegal(verb, what, e.state);
      e.state = ReviewState::rejected;
      break;
    case Verb::revoke:
      if (e.state != ReviewState::rejected) illegal(verb, what, e.state);
      e.state = ReviewState::pending;
      break;
    case Verb::edit:
      if (e.state == ReviewState::rejected) illegal(verb, what, e.state);
      e.state = ReviewState::accepted;
      if (e.provenance == Provenance::llm) e.provenance = Provenance::llm_edited;
      break;
    case Verb::add:
      break;
  }
}

std::string next_id(const Project& p, const char* tag, int& counter) {
  return p.id + "." + tag + std::to_string(counter++);
}

template <typename T, typename Vec>
T* find_by_id(Vec& items, std::string_view id) {
  for (auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::llm: return "llm";
    case Provenance::llm_edited: return "llm-edited";
    case Provenance::manual: return "manual";
  }
  return "llm";
}

std::string_view to_string(ReviewState s) noexcept {
  switch (s) {
    case ReviewState::pending: return "pending";
    case ReviewState::accepted: return "accepted";
    case ReviewState::rejected: return "rejected";
  }
  return "pending";
}

std::string_view to_string(Verb v) noexcept {
  switch (v) {
    case Verb::accept: return "accept";
    case Verb::reject: return "reject";
    case Verb::revoke: return "revoke";
    case Verb::edit: return "edit";
    case Verb::add: return "add";
  }
  return "accept";
}

std::string_view to_string(Actor a) noexcept { return a == Actor::human ? "human" : "system"; }

Provenance parse_provenance(std::string_view text) {
  if (text == "llm") return Provenance::llm;
  if (text == "llm-edited") return Provenance::llm_edited;
  if (text == "manual") return Provenance::manual;
  throw Error(ErrorCode::validation, "unknown provenance '" + std::string(text) + "'");
}

ReviewState parse_review_state(std::string_view text) {
  if (text == "pending") return ReviewState::pending;
  if (text == "accepted") return ReviewState::accepted;
  if (text == "rejected") return ReviewState::rejected;
  throw Error(ErrorCode::validation, "unknown review state '" + std::string(text) + "'");
}

Verb parse_verb(std::string_view text) {
  for (Verb v : {Verb::accept, Verb::reject, Verb::revoke, Verb::edit, Verb::add}) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorCode::validation, "unknown review verb '" + std::string(text) + "'");
}

Actor parse_actor(std::string_view text) {
  if (text == "human") return Actor::human;
  if (text == "system") return Actor::system;
  throw Error(ErrorCode::validation, "unknown actor '" + std::string(text) + "'");
}

std::string TestScenario::text() const { return agents::scenario_prompt_text(name, description); }

const spec::ApiOperation* Project::find_operation(std::string_view entity_id) const {
  auto prefix = id + ".";
  if (!entity_id.starts_with(prefix)) return nullptr;
  return spec.find(entity_id.substr(prefix.size()));
}

const spec::ApiOperation& Project::operation(std::string_view entity_id) const {
  if (const auto* op = find_operation(entity_id)) return *op;
  throw Error(ErrorCode::not_found, "operation " + std::string(entity_id) + " not found");
}

std::vector<std::string> Project::operation_ids() const {
  std::vector<std::string> out;
  for (const auto& op : spec.operations) out.push_back(operation_id(op));
  return out;
}

TestScenario* Project::find_scenario(std::string_view sid) { return find_by_id<TestScenario>(scenarios, sid); }
const TestScenario* Project::find_scenario(std::string_view sid) const {
  return find_by_id<const TestScenario>(scenarios, sid);
}
TestScenario& Project::scenario(std::string_view sid) {
  if (auto* s = find_scenario(sid)) return *s;
  throw Error(ErrorCode::not_found, "scenario " + std::string(sid) + " not found");
}
const TestScenario& Project::scenario(std::string_view sid) const {
  if (const auto* s = find_scenario(sid)) return *s;
  throw Error(ErrorCode::not_found, "scenario " + std::string(sid) + " not found");
}
TestScript* Project::find_script(std::string_view tid) { return find_by_id<TestScript>(scripts, tid); }
const TestScript* Project::find_script(std::string_view tid) const { return find_by_id<const TestScript>(scripts, tid); }
TestScript& Project::script(std::string_view tid) {
  if (auto* t = find_script(tid)) return *t;
  throw Error(ErrorCode::not_found, "script " + std::string(tid) + " not found");
}
const TestScript& Project::script(std::string_view tid) const {
  if (const auto* t = find_script(tid)) return *t;
  throw Error(ErrorCode::not_found, "script " + std::string(tid) + " not found");
}

const exec::ExecutionResult* Project::find_execution(std::string_view eid) const {
  return find_by_id<const exec::ExecutionResult>(executions, eid);
}

const exec::ExecutionResult* Project::latest_execution(const TestScript& t) const {
  if (t.execution_ids.empty()) return nullptr;
  return find_execution(t.execution_ids.back());
}

std::vector<const TestScenario*> Project::unit_scenarios(std::string_view op_id) const {
  std::vector<const TestScenario*> out;
  for (const auto& s : scenarios) {
    if (s.kind == agents::ScenarioKind::unit && !s.operation_ids.empty() && s.operation_ids.front() == op_id) {
      out.push_back(&s);
    }
  }
  return out;
}

std::vector<const TestScenario*> Project::system_scenarios() const {
  std::vector<const TestScenario*> out;
  for (const auto& s : scenarios) {
    if (s.kind == agents::ScenarioKind::system) out.push_back(&s);
  }
  return out;
}

std::vector<const TestScenario*> Project::system_scenarios_of(std::string_view op_id) const {
  std::vector<const TestScenario*> out;
  for (const auto& s : scenarios) {
    if (s.kind == agents::ScenarioKind::system &&
        std::find(s.operation_ids.begin(), s.operation_ids.end(), op_id) != s.operation_ids.end()) {
      out.push_back(&s);
    }
  }
  return out;
}

std::vector<const TestScript*> Project::scripts_of(std::string_view scenario_id) const {
  std::vector<const TestScript*> out;
  for (const auto& t : scripts) {
    if (t.scenario_id == scenario_id) out.push_back(&t);
  }
  return out;
}

std::vector<agents::OperationRef> Project::operation_refs(std::span<const std::string> op_ids) const {
  std::vector<agents::OperationRef> out;
  for (const auto& oid : op_ids) {
    const auto& op = operation(oid);
    out.push_back(agents::OperationRef{op.key(), spec::render_operation_detail(op)});
  }
  return out;
}

bool Project::operator==(const Project& o) const {
  return id == o.id && source == o.source && host_url == o.host_url && created_at == o.created_at &&
         spec.title == o.spec.title && spec.version_tag == o.spec.version_tag && spec.host_url == o.spec.host_url &&
         spec.operations == o.spec.operations && spec.raw_document == o.spec.raw_document &&
         scenarios == o.scenarios && scripts == o.scripts && executions == o.executions &&
         metric_records == o.metric_records && actions == o.actions && completions == o.completions &&
         next_scenario == o.next_scenario && next_script == o.next_script && next_execution == o.next_execution &&
         next_completion == o.next_completion;
}

Project new_project(std::string id, spec::ApiSpecification spec, std::string host_url, const Clock& clock) {
  Project p;
  p.id = std::move(id);
  p.source = spec.source;
  p.host_url = host_url.empty() ? spec.host_url : std::move(host_url);
  p.created_at = clock();
  p.spec = std::move(spec);
  return p;
}

std::string record_completion(Project& p, llm::CompletionRecord rec) {
  rec.id = next_id(p, "c", p.next_completion);
  p.completions.push_back(std::move(rec));
  return p.completions.back().id;
}

std::vector<std::string> admit_drafts(Project& p, std::span<const agents::ScenarioDraft> drafts,
                                      std::span<const std::string> owner_op_ids, const std::string& completion_id,
                                      const Clock& clock) {
  for (const auto& oid : owner_op_ids) p.operation(oid);
  if (!drafts.empty() && owner_op_ids.empty()) throw Error(ErrorCode::not_found, "drafts need an owning operation");
  std::vector<std::string> ids;
  for (const auto& d : drafts) {
    if (d.kind == agents::ScenarioKind::unit && owner_op_ids.size() != 1) {
      throw Error(ErrorCode::validation, "a unit scenario belongs to exactly one operation");
    }
    TestScenario s;
    s.id = next_id(p, "sc", p.next_scenario);
    s.kind = d.kind;
    if (d.kind == agents::ScenarioKind::system && !d.referenced_operations.empty()) {
      for (const auto& key : d.referenced_operations) {
        if (const auto* op = p.spec.find_by_key(key)) s.operation_ids.push_back(p.operation_id(*op));
      }
    }
    if (s.operation_ids.empty()) s.operation_ids.assign(owner_op_ids.begin(), owner_op_ids.end());
    s.name = d.name;
    s.description = d.description;
    s.original_name = d.name;
    s.original_description = d.description;
    s.provenance = Provenance::llm;
    s.state = ReviewState::pending;
    s.flags = d.flags;
    for (const auto& other : p.scenarios) {
      if (other.kind == s.kind && other.operation_ids == s.operation_ids && other.name == s.name &&
          other.description == s.description) {
        s.flags.push_back("duplicate of " + other.id);
        break;
      }
    }
    s.completion_id = completion_id;
    s.created_at = s.updated_at = clock();
    ids.push_back(s.id);
    p.scenarios.push_back(std::move(s));
  }
  return ids;
}

std::string admit_script(Project& p, const std::string& scenario_id, const agents::GeneratedScript& gen,
                         std::span<const std::string> op_ids, const Clock& clock) {
  p.scenario(scenario_id);
  TestScript t;
  t.id = next_id(p, "ts", p.next_script);
  t.scenario_id = scenario_id;
  t.operation_ids.assign(op_ids.begin(), op_ids.end());
  t.host_url = gen.host_url;
  t.original_text = gen.script_text;
  t.text = gen.script_text;
  t.provenance = Provenance::llm;
  t.state = ReviewState::pending;
  t.needs_review = gen.needs_review;
  t.warnings = gen.warnings;
  t.completion_id = gen.completion_id;
  t.created_at = t.updated_at = clock();
  p.scripts.push_back(std::move(t));
  return p.scripts.back().id;
}

std::string apply_review(Project& p, ReviewAction action, const Clock& clock) {
  const auto now = clock();
  std::string result;
  if (action.verb == Verb::add) {
    if (p.find_operation(action.target_id) != nullptr || action.target_id == p.id) {
      const bool system = action.target_id == p.id;
      TestScenario s;
      s.kind = system ? agents::ScenarioKind::system : agents::ScenarioKind::unit;
      if (system) {
        if (action.operation_ids.empty()) {
          throw Error(ErrorCode::validation, "a system scenario needs at least one operation");
        }
        for (const auto& oid : action.operation_ids) p.operation(oid);
        s.operation_ids = action.operation_ids;
      } else {
        s.operation_ids = {action.target_id};
      }
      s.name = action.name.value_or("");
      s.description = action.description.value_or("");
      if (blank(s.name)) throw Error(ErrorCode::validation, "scenario name must not be empty");
      s.id = next_id(p, "sc", p.next_scenario);
      s.provenance = Provenance::manual;
      s.state = ReviewState::accepted;
      s.created_at = s.updated_at = now;
      result = s.id;
      p.scenarios.push_back(std::move(s));
    } else if (const auto* owner = p.find_scenario(action.target_id)) {
      if (!action.text || blank(*action.text)) throw Error(ErrorCode::validation, "script text must not be empty");
      TestScript t;
      t.scenario_id = owner->id;
      t.operation_ids = action.operation_ids.empty() ? owner->operation_ids : action.operation_ids;
      for (const auto& oid : t.operation_ids) p.operation(oid);
      t.id = next_id(p, "ts", p.next_script);
      t.host_url = p.host_url;
      t.text = *action.text;
      t.provenance = Provenance::manual;
      t.state = ReviewState::accepted;
      t.created_at = t.updated_at = now;
      result = t.id;
      p.scripts.push_back(std::move(t));
    } else {
      throw Error(ErrorCode::not_found, "owner " + action.target_id + " not found");
    }
  } else if (auto* s = p.find_scenario(action.target_id)) {
    if (action.verb == Verb::edit) {
      if (!action.name && !action.description) throw Error(ErrorCode::validation, "edit carries no text");
      auto name = action.name.value_or(s->name);
      if (blank(name)) throw Error(ErrorCode::validation, "scenario name must not be empty");
      transition(*s, action.verb, "scenario");
      s->history.push_back(ArchivedText{s->text(), now});
      s->name = std::move(name);
      s->description = action.description.value_or(s->description);
    } else {
      transition(*s, action.verb, "scenario");
    }
    s->updated_at = now;
    result = s->id;
  } else if (auto* t = p.find_script(action.target_id)) {
    if (action.verb == Verb::edit) {
      if (!action.text || blank(*action.text)) throw Error(ErrorCode::validation, "script text must not be empty");
      transition(*t, action.verb, "script");
      t->history.push_back(ArchivedText{t->text, now});
      t->text = *action.text;
      t->syntax.reset();
    } else {
      transition(*t, action.verb, "script");
    }
    t->updated_at = now;
    result = t->id;
  } else {
    throw Error(ErrorCode::not_found, "entity " + action.target_id + " not found");
  }
  action.timestamp = now;
  action.result_id = result;
  p.actions.push_back(std::move(action));
  return result;
}

std::string admit_execution(Project& p, const std::string& script_id, exec::ExecutionResult result) {
  auto& t = p.script(script_id);
  result.id = next_id(p, "ex", p.next_execution);
  result.script_id = script_id;
  t.execution_ids.push_back(result.id);
  p.executions.push_back(std::move(result));
  return p.executions.back().id;
}

Clock system_clock() {
  return [] { return exec::utc_timestamp(); };
}

}  // namespace restcheck::workflow
