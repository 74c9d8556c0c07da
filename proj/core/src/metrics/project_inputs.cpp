#include "restcheck/metrics/project_inputs.hpp"

#include "restcheck/agents/reports.hpp"

namespace restcheck::metrics {

namespace {

using workflow::Provenance;

std::string record_key(const MetricRecord& m) { return m.variant.empty() ? m.metric : m.metric + "/" + m.variant; }

}  // namespace

MetricInputs build_inputs(const workflow::Project& p) {
  MetricInputs in;
  std::map<std::string, std::string> op_by_key;
  for (const auto& op : p.spec.operations) {
    const std::string oid = p.operation_id(op);
    in.ops.insert(oid);
    op_by_key[op.key()] = oid;
    in.code_exp[oid] = spec::expected_status_codes(op).codes;
    in.code_rec[oid];
    in.s_fin[oid];
    in.s_llm[oid];
  }

  for (const auto& s : p.scenarios) {
    if (s.kind == agents::ScenarioKind::unit) {
      if (s.operation_ids.empty()) continue;
      const auto& oid = s.operation_ids.front();
      if (s.is_final()) in.s_fin[oid].insert(s.id);
      if (s.accepted_unmodified()) in.s_llm[oid].insert(s.id);
    } else {
      if (s.is_final()) in.s_fin_sys.insert(s.id);
      if (s.accepted_unmodified()) in.s_llm_sys.insert(s.id);
    }
  }

  for (const auto& t : p.scripts) {
    if (!t.is_final()) continue;
    in.t_fin.insert(t.id);
    if (t.llm_origin()) {
      in.t_llm.insert(t.id);
      in.valid_syn[t.id] = t.original_syntax == exec::SyntaxVerdict::valid;
      in.valid_dt[t.id] = t.data_type_verdict;
      in.original_text[t.id] = t.original_text.value_or(t.text);
      in.final_text[t.id] = t.text;
    }
    const auto* sc = p.find_scenario(t.scenario_id);
    if (sc != nullptr && sc->kind == agents::ScenarioKind::system && sc->is_final()) {
      in.ops_of_final_system_scripts[t.id].insert(t.operation_ids.begin(), t.operation_ids.end());
    }

    for (const auto& eid : t.execution_ids) {
      const auto* e = p.find_execution(eid);
      if (e == nullptr) continue;
      for (const auto& [key, codes] : e->observed_status_codes) {
        auto it = op_by_key.find(key);
        if (it == op_by_key.end()) continue;
        for (int c : codes) in.code_rec[it->second].insert(std::to_string(c));
      }
    }
    if (t.status_code_report) {
      for (const auto& [key, codes] : t.status_code_report->per_endpoint) {
        auto it = op_by_key.find(agents::normalize_endpoint(key));
        if (it == op_by_key.end()) continue;
        in.code_rec[it->second].insert(codes.observed.begin(), codes.observed.end());
      }
    }
  }
  return in;
}

std::vector<MetricRecord> evaluate_project(const workflow::Project& p, const std::string& computed_at) {
  return evaluate(build_inputs(p), p.id, computed_at);
}

TableRow table_row(const std::string& api, std::span<const MetricRecord> records, const std::string& scope) {
  TableRow row{api, {}};
  for (const auto& m : records) {
    if (m.scope != scope) continue;
    row.values[record_key(m)] = presented(m);
  }
  return row;
}

}  // namespace restcheck::metrics
