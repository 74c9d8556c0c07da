#include "restcheck/workflow/store.hpp"

namespace restcheck::workflow {

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

Json history_json(const std::vector<ArchivedText>& h) {
  Json out = Json::array();
  for (const auto& a : h) out.push_back(Json{{"text", a.text}, {"archived_at", a.archived_at}});
  return out;
}

std::vector<ArchivedText> history_from(const Json& j) {
  std::vector<ArchivedText> out;
  for (const auto& a : j) out.push_back(ArchivedText{a.at("text").get<std::string>(), a.at("archived_at").get<std::string>()});
  return out;
}

std::optional<exec::SyntaxVerdict> verdict_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  auto s = j.get<std::string>();
  if (s == "valid") return exec::SyntaxVerdict::valid;
  if (s == "invalid") return exec::SyntaxVerdict::invalid;
  return exec::SyntaxVerdict::unknown;
}

Json verdict_json(const std::optional<exec::SyntaxVerdict>& v) {
  return v ? Json(std::string(exec::to_string(*v))) : Json(nullptr);
}

}  // namespace

Json to_json(const TestScenario& s) {
  return Json{{"id", s.id},
              {"kind", agents::to_string(s.kind)},
              {"operation_ids", s.operation_ids},
              {"name", s.name},
              {"description", s.description},
              {"original_name", opt(s.original_name)},
              {"original_description", opt(s.original_description)},
              {"provenance", to_string(s.provenance)},
              {"review_state", to_string(s.state)},
              {"flags", s.flags},
              {"completion_id", s.completion_id},
              {"history", history_json(s.history)},
              {"created_at", s.created_at},
              {"updated_at", s.updated_at}};
}

TestScenario scenario_from_json(const Json& j) {
  TestScenario s;
  s.id = j.at("id").get<std::string>();
  s.kind = agents::parse_scenario_kind(j.at("kind").get<std::string>());
  s.operation_ids = j.at("operation_ids").get<std::vector<std::string>>();
  s.name = j.at("name").get<std::string>();
  s.description = j.at("description").get<std::string>();
  s.original_name = opt_string(j, "original_name");
  s.original_description = opt_string(j, "original_description");
  s.provenance = parse_provenance(j.at("provenance").get<std::string>());
  s.state = parse_review_state(j.at("review_state").get<std::string>());
  s.flags = j.at("flags").get<std::vector<std::string>>();
  s.completion_id = j.at("completion_id").get<std::string>();
  s.history = history_from(j.at("history"));
  s.created_at = j.at("created_at").get<std::string>();
  s.updated_at = j.at("updated_at").get<std::string>();
  return s;
}

Json to_json(const TestScript& t) {
  return Json{{"id", t.id},
              {"scenario_id", t.scenario_id},
              {"operation_ids", t.operation_ids},
              {"host_url", t.host_url},
              {"original_text", opt(t.original_text)},
              {"text", t.text},
              {"provenance", to_string(t.provenance)},
              {"review_state", to_string(t.state)},
              {"original_syntax", verdict_json(t.original_syntax)},
              {"syntax", verdict_json(t.syntax)},
              {"data_type_report", t.data_type_report ? agents::to_json(*t.data_type_report) : Json(nullptr)},
              {"data_type_verdict", opt(t.data_type_verdict)},
              {"method_coverage_report",
               t.method_coverage_report ? agents::to_json(*t.method_coverage_report) : Json(nullptr)},
              {"status_code_report", t.status_code_report ? agents::to_json(*t.status_code_report) : Json(nullptr)},
              {"execution_ids", t.execution_ids},
              {"needs_review", t.needs_review},
              {"warnings", t.warnings},
              {"completion_id", t.completion_id},
              {"history", history_json(t.history)},
              {"created_at", t.created_at},
              {"updated_at", t.updated_at}};
}

TestScript script_from_json(const Json& j) {
  TestScript t;
  t.id = j.at("id").get<std::string>();
  t.scenario_id = j.at("scenario_id").get<std::string>();
  t.operation_ids = j.at("operation_ids").get<std::vector<std::string>>();
  t.host_url = j.at("host_url").get<std::string>();
  t.original_text = opt_string(j, "original_text");
  t.text = j.at("text").get<std::string>();
  t.provenance = parse_provenance(j.at("provenance").get<std::string>());
  t.state = parse_review_state(j.at("review_state").get<std::string>());
  t.original_syntax = verdict_from(j.at("original_syntax"));
  t.syntax = verdict_from(j.at("syntax"));
  if (!j.at("data_type_report").is_null()) t.data_type_report = agents::data_type_report_from_json(j.at("data_type_report"));
  if (!j.at("data_type_verdict").is_null()) t.data_type_verdict = j.at("data_type_verdict").get<bool>();
  if (!j.at("method_coverage_report").is_null()) {
    t.method_coverage_report = agents::method_coverage_report_from_json(j.at("method_coverage_report"));
  }
  if (!j.at("status_code_report").is_null()) {
    t.status_code_report = agents::status_code_report_from_json(j.at("status_code_report"));
  }
  t.execution_ids = j.at("execution_ids").get<std::vector<std::string>>();
  t.needs_review = j.at("needs_review").get<bool>();
  t.warnings = j.at("warnings").get<std::vector<std::string>>();
  t.completion_id = j.at("completion_id").get<std::string>();
  t.history = history_from(j.at("history"));
  t.created_at = j.at("created_at").get<std::string>();
  t.updated_at = j.at("updated_at").get<std::string>();
  return t;
}

Json to_json(const ReviewAction& a) {
  return Json{{"target_id", a.target_id},
              {"verb", to_string(a.verb)},
              {"name", opt(a.name)},
              {"description", opt(a.description)},
              {"text", opt(a.text)},
              {"operation_ids", a.operation_ids},
              {"actor", to_string(a.actor)},
              {"timestamp", a.timestamp},
              {"result_id", a.result_id}};
}

ReviewAction action_from_json(const Json& j) {
  ReviewAction a;
  a.target_id = j.at("target_id").get<std::string>();
  a.verb = parse_verb(j.at("verb").get<std::string>());
  a.name = opt_string(j, "name");
  a.description = opt_string(j, "description");
  a.text = opt_string(j, "text");
  a.operation_ids = j.at("operation_ids").get<std::vector<std::string>>();
  a.actor = parse_actor(j.at("actor").get<std::string>());
  a.timestamp = j.at("timestamp").get<std::string>();
  a.result_id = j.at("result_id").get<std::string>();
  return a;
}

Json to_json(const llm::CompletionRecord& c) {
  return Json{{"id", c.id},
              {"template_name", c.template_name},
              {"prompt_hash", c.prompt_hash},
              {"system_message", c.system_message},
              {"user_message", c.user_message},
              {"text", c.text},
              {"model_name", c.model_name},
              {"latency_ms", c.latency_ms},
              {"attempts", c.attempts}};
}

llm::CompletionRecord completion_from_json(const Json& j) {
  llm::CompletionRecord c;
  c.id = j.at("id").get<std::string>();
  c.template_name = j.at("template_name").get<std::string>();
  c.prompt_hash = j.at("prompt_hash").get<std::string>();
  c.system_message = j.at("system_message").get<std::string>();
  c.user_message = j.at("user_message").get<std::string>();
  c.text = j.at("text").get<std::string>();
  c.model_name = j.at("model_name").get<std::string>();
  c.latency_ms = j.at("latency_ms").get<std::int64_t>();
  c.attempts = j.at("attempts").get<int>();
  return c;
}

Json to_bundle(const Project& p) {
  Json ops = Json::array();
  for (const auto& op : p.spec.operations) {
    ops.push_back(Json{{"id", p.operation_id(op)}, {"key", op.key()}, {"summary", op.summary}});
  }
  Json bundle{{"format", "restcheck-project"},
              {"version", kBundleVersion},
              {"project",
               Json{{"id", p.id},
                    {"source", p.source},
                    {"host_url", p.host_url},
                    {"created_at", p.created_at},
                    {"counters",
                     Json{{"scenario", p.next_scenario},
                          {"script", p.next_script},
                          {"execution", p.next_execution},
                          {"completion", p.next_completion}}}}},
              {"spec",
               Json{{"source", p.spec.source},
                    {"title", p.spec.title},
                    {"version_tag", p.spec.version_tag},
                    {"host_url", p.spec.host_url},
                    {"document", p.spec.raw_document},
                    {"operations", ops}}}};
  auto list = [](const auto& items) {
    Json arr = Json::array();
    for (const auto& item : items) arr.push_back(to_json(item));
    return arr;
  };
  bundle["scenarios"] = list(p.scenarios);
  bundle["scripts"] = list(p.scripts);
  Json executions = Json::array();
  for (const auto& e : p.executions) executions.push_back(exec::to_json(e));
  bundle["executions"] = executions;
  bundle["metric_records"] = list(p.metric_records);
  bundle["actions"] = list(p.actions);
  bundle["completions"] = list(p.completions);
  return bundle;
}

Project from_bundle(const Json& bundle) {
  if (!bundle.is_object() || bundle.value("format", std::string()) != "restcheck-project") {
    throw Error(ErrorCode::validation, "not a project bundle");
  }
  const int version = bundle.value("version", 0);
  if (version != kBundleVersion) {
    throw Error(ErrorCode::version_mismatch,
                "bundle version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kBundleVersion) + ")",
                Json{{"found", version}, {"expected", kBundleVersion}});
  }
  try {
    Project p;
    const auto& meta = bundle.at("project");
    p.id = meta.at("id").get<std::string>();
    p.source = meta.at("source").get<std::string>();
    p.host_url = meta.at("host_url").get<std::string>();
    p.created_at = meta.at("created_at").get<std::string>();
    const auto& counters = meta.at("counters");
    p.next_scenario = counters.at("scenario").get<int>();
    p.next_script = counters.at("script").get<int>();
    p.next_execution = counters.at("execution").get<int>();
    p.next_completion = counters.at("completion").get<int>();
    const auto& sp = bundle.at("spec");
    p.spec = spec::parse_spec(sp.at("document"), sp.at("source").get<std::string>());
    for (const auto& s : bundle.at("scenarios")) p.scenarios.push_back(scenario_from_json(s));
    for (const auto& t : bundle.at("scripts")) p.scripts.push_back(script_from_json(t));
    for (const auto& e : bundle.at("executions")) p.executions.push_back(exec::execution_from_json(e));
    for (const auto& m : bundle.at("metric_records")) p.metric_records.push_back(metrics::metric_record_from_json(m));
    for (const auto& a : bundle.at("actions")) p.actions.push_back(action_from_json(a));
    for (const auto& c : bundle.at("completions")) p.completions.push_back(completion_from_json(c));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::validation, std::string("malformed project bundle: ") + e.what());
  }
}

void InMemoryStore::save(const Project& p) {
  auto text = to_bundle(p).dump();
  std::lock_guard lock(mutex_);
  bundles_[p.id] = std::move(text);
}

Project InMemoryStore::load(std::string_view id) {
  std::string text;
  {
    std::lock_guard lock(mutex_);
    auto it = bundles_.find(id);
    if (it == bundles_.end()) throw Error(ErrorCode::not_found, "project " + std::string(id) + " not found");
    text = it->second;
  }
  return from_bundle(Json::parse(text));
}

std::vector<std::string> InMemoryStore::list() {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : bundles_) ids.push_back(id);
  return ids;
}

std::unique_ptr<ProjectStore> open_store(const std::string& location) {
  if (location.empty() || location == ":memory:") return std::make_unique<InMemoryStore>();
  return std::make_unique<SqliteStore>(location);
}

}  // namespace restcheck::workflow
