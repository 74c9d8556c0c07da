#include "restcheck/workflow/summary.hpp"

#include <algorithm>

namespace restcheck::workflow {

namespace {

double percent(int part, int whole) { return whole == 0 ? 0.0 : 100.0 * part / whole; }

bool executed(const Project& p, const TestScript& t) { return p.latest_execution(t) != nullptr; }

bool has_executed_final_script(const Project& p, const TestScenario& s) {
  for (const auto* t : p.scripts_of(s.id)) {
    if (t->is_final() && executed(p, *t)) return true;
  }
  return false;
}

template <typename T>
EntityNode leaf_group(std::string id, NodeType type, std::string entity_id, std::string name,
                      const std::vector<const T*>& items) {
  EntityNode n{std::move(id), type, std::move(entity_id), std::move(name)};
  n.children_total = static_cast<int>(items.size());
  n.children_reviewed = static_cast<int>(std::count_if(items.begin(), items.end(), [](const T* x) { return x->reviewed(); }));
  n.completion_percent = n.children_total == 0 ? 100.0 : 100.0 * n.children_reviewed / n.children_total;
  return n;
}

EntityNode scripts_node(const Project& p, const TestScenario& s) {
  return leaf_group(s.id + "/scripts", NodeType::scenario_scripts, s.id, s.name, p.scripts_of(s.id));
}

}  // namespace

ScenarioGroupSummary summarize_scenarios(const std::vector<const TestScenario*>& items) {
  ScenarioGroupSummary g;
  for (const auto* s : items) {
    ++g.total;
    if (s->reviewed()) ++g.reviewed;
    if (!s->is_final()) {
      ++g.rejected;
      continue;
    }
    ++g.count;
    if (s->accepted_unmodified()) ++g.accepted_unmodified;
    if (s->provenance == Provenance::manual) ++g.manually_added;
    if (s->provenance == Provenance::llm_edited) ++g.edited;
  }
  g.percent_reviewed = percent(g.reviewed, g.total);
  g.percent_accepted = percent(g.accepted_unmodified, g.count);
  return g;
}

ScriptGroupSummary summarize_scripts(const Project& p, const std::vector<const TestScript*>& items) {
  ScriptGroupSummary g;
  for (const auto* t : items) {
    ++g.total;
    if (t->reviewed()) ++g.reviewed;
    if (!t->is_final()) {
      ++g.rejected;
      continue;
    }
    ++g.count;
    if (t->provenance == Provenance::llm && t->state == ReviewState::accepted) ++g.accepted_unmodified;
    if (t->provenance == Provenance::manual) ++g.manually_added;
    if (t->provenance == Provenance::llm_edited) ++g.edited;
    if (const auto* ex = p.latest_execution(*t)) {
      ++g.executed;
      if (!ex->all_passed()) ++g.failed;
    }
    if (t->syntax == exec::SyntaxVerdict::invalid) ++g.syntax_errors;
    if (t->data_type_verdict ? !*t->data_type_verdict
                             : (t->data_type_report && !t->data_type_report->all_matched())) {
      ++g.data_type_errors;
    }
    if (t->method_coverage_report && t->method_coverage_report->coverage_percent &&
        *t->method_coverage_report->coverage_percent < 100.0) {
      ++g.semantic_errors;
    }
  }
  g.percent_reviewed = percent(g.reviewed, g.total);
  g.percent_executed = percent(g.executed, g.count);
  g.percent_accepted = percent(g.accepted_unmodified, g.count);
  return g;
}

SummarySnapshot compute_summary(const Project& p, std::string_view entity_id) {
  SummarySnapshot s;
  s.entity_id = std::string(entity_id);
  if (entity_id == p.id) {
    s.entity_type = "project";
    OperationGroupSummary ops;
    for (const auto& oid : p.operation_ids()) {
      ++ops.count;
      auto units = p.unit_scenarios(oid);
      bool any_final = false;
      bool unit_done = true;
      for (const auto* sc : units) {
        if (!sc->is_final()) continue;
        any_final = true;
        unit_done = unit_done && has_executed_final_script(p, *sc);
      }
      if (any_final && unit_done) ++ops.unit_test_completed;
      auto systems = p.system_scenarios_of(oid);
      if (std::any_of(systems.begin(), systems.end(),
                      [&](const TestScenario* sc) { return sc->is_final() && has_executed_final_script(p, *sc); })) {
        ++ops.system_test_completed;
      }
    }
    s.operations = ops;
    s.system_scenarios = summarize_scenarios(p.system_scenarios());
  } else if (p.find_operation(entity_id) != nullptr) {
    s.entity_type = "operation";
    s.unit_scenarios = summarize_scenarios(p.unit_scenarios(entity_id));
    s.system_scenarios = summarize_scenarios(p.system_scenarios_of(entity_id));
  } else if (p.find_scenario(entity_id) != nullptr) {
    s.entity_type = "scenario";
    s.scripts = summarize_scripts(p, p.scripts_of(entity_id));
  } else {
    throw Error(ErrorCode::not_found, "entity " + std::string(entity_id) + " not found");
  }
  return s;
}

std::string_view to_string(NodeType t) noexcept {
  switch (t) {
    case NodeType::home: return "home";
    case NodeType::spec: return "spec";
    case NodeType::operation_unit_scenarios: return "operation-unit-scenarios";
    case NodeType::system_scenarios: return "system-scenarios";
    case NodeType::operation_system_scenarios: return "operation-system-scenarios";
    case NodeType::scenario_scripts: return "scenario-scripts";
  }
  return "home";
}

EntityNode build_tree(const Project& p) {
  EntityNode spec_node{p.id, NodeType::spec, p.id, p.spec.title.empty() ? p.source : p.spec.title};
  for (const auto& op : p.spec.operations) {
    auto oid = p.operation_id(op);
    auto units = p.unit_scenarios(oid);
    auto node = leaf_group(oid + "/unit", NodeType::operation_unit_scenarios, oid, op.key(), units);
    for (const auto* sc : units) node.children.push_back(scripts_node(p, *sc));
    ++spec_node.children_total;
    if (!units.empty() && node.children_reviewed == node.children_total) ++spec_node.children_reviewed;
    spec_node.children.push_back(std::move(node));
  }
  auto systems = p.system_scenarios();
  auto sys_node = leaf_group(p.id + "/system", NodeType::system_scenarios, p.id, "System test scenarios", systems);
  for (const auto& op : p.spec.operations) {
    auto oid = p.operation_id(op);
    sys_node.children.push_back(
        leaf_group(oid + "/system", NodeType::operation_system_scenarios, oid, op.key(), p.system_scenarios_of(oid)));
  }
  for (const auto* sc : systems) sys_node.children.push_back(scripts_node(p, *sc));
  spec_node.children.push_back(std::move(sys_node));
  spec_node.completion_percent =
      spec_node.children_total == 0 ? 100.0 : 100.0 * spec_node.children_reviewed / spec_node.children_total;

  EntityNode home{"home", NodeType::home, p.id, "Home"};
  home.children_total = 1;
  home.children_reviewed = spec_node.completion_percent >= 100.0 ? 1 : 0;
  home.completion_percent = 100.0 * home.children_reviewed;
  home.children.push_back(std::move(spec_node));
  return home;
}

namespace {

Json scenario_group_json(const ScenarioGroupSummary& g) {
  return Json{{"total", g.total},
              {"count", g.count},
              {"reviewed", g.reviewed},
              {"percent_reviewed", g.percent_reviewed},
              {"accepted_unmodified", g.accepted_unmodified},
              {"percent_accepted", g.percent_accepted},
              {"manually_added", g.manually_added},
              {"edited", g.edited},
              {"rejected", g.rejected}};
}

}  // namespace

Json to_json(const SummarySnapshot& s) {
  Json j{{"entity_id", s.entity_id}, {"entity_type", s.entity_type}};
  if (s.operations) {
    j["operations"] = Json{{"count", s.operations->count},
                           {"unit_test_completed", s.operations->unit_test_completed},
                           {"system_test_completed", s.operations->system_test_completed}};
  }
  if (s.unit_scenarios) j["unit_scenarios"] = scenario_group_json(*s.unit_scenarios);
  if (s.system_scenarios) j["system_scenarios"] = scenario_group_json(*s.system_scenarios);
  if (s.scripts) {
    const auto& g = *s.scripts;
    j["scripts"] = Json{{"total", g.total},
                        {"count", g.count},
                        {"reviewed", g.reviewed},
                        {"percent_reviewed", g.percent_reviewed},
                        {"executed", g.executed},
                        {"percent_executed", g.percent_executed},
                        {"accepted_unmodified", g.accepted_unmodified},
                        {"percent_accepted", g.percent_accepted},
                        {"manually_added", g.manually_added},
                        {"edited", g.edited},
                        {"failed", g.failed},
                        {"syntax_errors", g.syntax_errors},
                        {"data_type_errors", g.data_type_errors},
                        {"semantic_errors", g.semantic_errors},
                        {"rejected", g.rejected}};
  }
  return j;
}

Json to_json(const EntityNode& n) {
  Json children = Json::array();
  for (const auto& c : n.children) children.push_back(to_json(c));
  return Json{{"id", n.id},
              {"node_type", to_string(n.node_type)},
              {"entity_id", n.entity_id},
              {"display_name", n.display_name},
              {"completion_percent", n.completion_percent},
              {"children_total", n.children_total},
              {"children_reviewed", n.children_reviewed},
              {"children", children}};
}

}  // namespace restcheck::workflow
