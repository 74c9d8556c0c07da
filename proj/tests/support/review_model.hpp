#pragma once

// Randomized review-sequence checker. A shadow state table predicts the
// legality and outcome of every verb; summaries are recomputed by scanning
// the raw entity vectors.

#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "restcheck/testkit/fixtures.hpp"
#include "restcheck/workflow/project.hpp"
#include "restcheck/workflow/summary.hpp"

namespace review_model {

using namespace restcheck;
using workflow::Project;
using workflow::Provenance;
using workflow::ReviewState;
using workflow::Verb;

inline bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

inline double pct(int part, int whole) { return whole == 0 ? 0.0 : 100.0 * part / whole; }

// Summary recomputed from raw vectors only.
class SummaryOracle {
 public:
  explicit SummaryOracle(const Project& p) : p_(p) {}

  const exec::ExecutionResult* latest(const workflow::TestScript& t) const {
    if (t.execution_ids.empty()) return nullptr;
    for (const auto& e : p_.executions)
      if (e.id == t.execution_ids.back()) return &e;
    return nullptr;
  }
  static bool passed(const exec::ExecutionResult& e) {
    if (!e.report_error.empty() || e.timed_out || e.cases.empty()) return false;
    for (const auto& c : e.cases)
      if (c.outcome != exec::Outcome::passed) return false;
    return true;
  }
  bool scenario_done(const workflow::TestScenario& s) const {
    for (const auto& t : p_.scripts)
      if (t.scenario_id == s.id && t.state != ReviewState::rejected && latest(t) != nullptr) return true;
    return false;
  }

  workflow::ScenarioGroupSummary scenarios(bool system, const std::string& op) const {
    workflow::ScenarioGroupSummary g;
    for (const auto& s : p_.scenarios) {
      if ((s.kind == agents::ScenarioKind::system) != system) continue;
      if (!op.empty() && !contains(s.operation_ids, op)) continue;
      ++g.total;
      if (s.state != ReviewState::pending) ++g.reviewed;
      if (s.state == ReviewState::rejected) {
        ++g.rejected;
        continue;
      }
      ++g.count;
      if (s.provenance == Provenance::llm && s.state == ReviewState::accepted) ++g.accepted_unmodified;
      if (s.provenance == Provenance::manual) ++g.manually_added;
      if (s.provenance == Provenance::llm_edited) ++g.edited;
    }
    g.percent_reviewed = pct(g.reviewed, g.total);
    g.percent_accepted = pct(g.accepted_unmodified, g.count);
    return g;
  }

  workflow::ScriptGroupSummary scripts(const std::string& scenario_id) const {
    workflow::ScriptGroupSummary g;
    for (const auto& t : p_.scripts) {
      if (t.scenario_id != scenario_id) continue;
      ++g.total;
      if (t.state != ReviewState::pending) ++g.reviewed;
      if (t.state == ReviewState::rejected) {
        ++g.rejected;
        continue;
      }
      ++g.count;
      if (t.provenance == Provenance::llm && t.state == ReviewState::accepted) ++g.accepted_unmodified;
      if (t.provenance == Provenance::manual) ++g.manually_added;
      if (t.provenance == Provenance::llm_edited) ++g.edited;
      if (const auto* e = latest(t)) {
        ++g.executed;
        if (!passed(*e)) ++g.failed;
      }
      if (t.syntax && *t.syntax == exec::SyntaxVerdict::invalid) ++g.syntax_errors;
      bool dt_error = false;
      if (t.data_type_verdict.has_value()) {
        dt_error = !*t.data_type_verdict;
      } else if (t.data_type_report) {
        for (const auto& [_, ep] : t.data_type_report->per_endpoint) dt_error = dt_error || ep.matched != ep.total || !ep.mismatches.empty();
      }
      if (dt_error) ++g.data_type_errors;
      const auto& mc = t.method_coverage_report;
      if (mc && mc->coverage_percent && *mc->coverage_percent < 100.0) ++g.semantic_errors;
    }
    g.percent_reviewed = pct(g.reviewed, g.total);
    g.percent_executed = pct(g.executed, g.count);
    g.percent_accepted = pct(g.accepted_unmodified, g.count);
    return g;
  }

  workflow::SummarySnapshot summary(const std::string& id) const {
    workflow::SummarySnapshot s;
    s.entity_id = id;
    if (id == p_.id) {
      s.entity_type = "project";
      workflow::OperationGroupSummary ops;
      for (const auto& op : p_.spec.operations) {
        const auto oid = p_.id + "." + op.id;
        ++ops.count;
        int final_units = 0, done_units = 0;
        bool system_done = false;
        for (const auto& sc : p_.scenarios) {
          if (sc.state == ReviewState::rejected || !contains(sc.operation_ids, oid)) continue;
          if (sc.kind == agents::ScenarioKind::unit) {
            ++final_units;
            if (scenario_done(sc)) ++done_units;
          } else if (scenario_done(sc)) {
            system_done = true;
          }
        }
        if (final_units > 0 && final_units == done_units) ++ops.unit_test_completed;
        if (system_done) ++ops.system_test_completed;
      }
      s.operations = ops;
      s.system_scenarios = scenarios(true, "");
      return s;
    }
    for (const auto& op : p_.spec.operations) {
      if (p_.id + "." + op.id == id) {
        s.entity_type = "operation";
        s.unit_scenarios = scenarios(false, id);
        s.system_scenarios = scenarios(true, id);
        return s;
      }
    }
    s.entity_type = "scenario";
    s.scripts = scripts(id);
    return s;
  }

 private:
  const Project& p_;
};

struct Shadow {
  ReviewState state;
  Provenance provenance;
  std::string text;
  std::string pre_reject_text;
};

// Runs one random sequence of `steps` actions; returns an empty string when
// every property held, otherwise a description of the first violation.
class Fuzzer {
 public:
  Fuzzer(const spec::ApiSpecification& spec, std::uint64_t seed) : rng_(seed) {
    p_ = workflow::new_project("p1", spec, "http://127.0.0.1:1", clock_);
    ops_ = p_.operation_ids();
  }

  std::string run(int steps) {
    for (int i = 0; i < steps; ++i) {
      step_ = i;
      if (auto err = step(); !err.empty()) return err;
      if (auto err = check(); !err.empty()) return err;
    }
    return {};
  }

  const Project& project() const { return p_; }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::string fail(const std::string& what) const {
    std::ostringstream out;
    out << "step " << step_ << ": " << what;
    return out.str();
  }
  std::string text_of(const std::string& id) const {
    if (const auto* s = p_.find_scenario(id)) return s->text();
    return p_.script(id).text;
  }
  void track(const std::string& id) {
    if (const auto* s = p_.find_scenario(id)) {
      shadow_[id] = Shadow{s->state, s->provenance, s->text(), {}};
    } else {
      const auto& t = p_.script(id);
      shadow_[id] = Shadow{t.state, t.provenance, t.text, {}};
    }
  }

  std::vector<std::string> op_subset() {
    std::vector<std::string> out;
    for (const auto& o : ops_)
      if (pick(2) == 0) out.push_back(o);
    if (out.empty()) out.push_back(ops_[pick(ops_.size())]);
    return out;
  }

  std::string step() {
    const auto roll = pick(20);
    const auto n = ++counter_;
    if (roll < 2 || p_.scenarios.empty()) {
      const bool system = pick(2) == 0;
      std::vector<agents::ScenarioDraft> drafts(1 + pick(3));
      for (auto& d : drafts) {
        d.name = "draft " + std::to_string(n);
        d.description = "description " + std::to_string(pick(3));
        d.kind = system ? agents::ScenarioKind::system : agents::ScenarioKind::unit;
      }
      std::vector<std::string> owners = system ? op_subset() : std::vector<std::string>{ops_[pick(ops_.size())]};
      for (const auto& id : workflow::admit_drafts(p_, drafts, owners, "", clock_)) track(id);
      return {};
    }
    if (roll < 4) {
      const auto& s = p_.scenarios[pick(p_.scenarios.size())];
      agents::GeneratedScript gen;
      gen.script_text = "def test_" + std::to_string(n) + "():\n    assert True\n";
      gen.host_url = p_.host_url;
      track(workflow::admit_script(p_, s.id, gen, s.operation_ids, clock_));
      return {};
    }
    if (roll < 5) {
      workflow::ReviewAction a;
      a.verb = Verb::add;
      const auto what = pick(3);
      if (what == 0) {
        a.target_id = ops_[pick(ops_.size())];
        a.name = "manual " + std::to_string(n);
      } else if (what == 1) {
        a.target_id = p_.id;
        a.name = "manual system " + std::to_string(n);
        a.operation_ids = op_subset();
      } else {
        a.target_id = p_.scenarios[pick(p_.scenarios.size())].id;
        a.text = "def test_manual():\n    pass\n";
      }
      track(workflow::apply_review(p_, a, clock_));
      return {};
    }
    if (roll < 7 && !p_.scripts.empty()) {
      auto& t = p_.scripts[pick(p_.scripts.size())];
      exec::ExecutionResult r;
      r.cases.push_back({"test_a", pick(2) == 0 ? exec::Outcome::passed : exec::Outcome::failed, "", {}});
      if (pick(4) == 0) r.cases.clear();
      workflow::admit_execution(p_, t.id, r);
      return {};
    }
    if (roll < 8 && !p_.scripts.empty()) {
      auto& t = p_.scripts[pick(p_.scripts.size())];
      switch (pick(3)) {
        case 0: t.syntax = pick(2) == 0 ? exec::SyntaxVerdict::valid : exec::SyntaxVerdict::invalid; break;
        case 1: t.data_type_verdict = pick(2) == 0; break;
        default: {
          agents::MethodCoverageReport m;
          m.coverage_percent = pick(2) == 0 ? 100.0 : 50.0;
          t.method_coverage_report = m;
        }
      }
      return {};
    }
    return review();
  }

  std::string review() {
    std::vector<std::string> ids;
    for (const auto& s : p_.scenarios) ids.push_back(s.id);
    for (const auto& t : p_.scripts) ids.push_back(t.id);
    const auto id = ids[pick(ids.size())];
    static constexpr Verb kVerbs[] = {Verb::accept, Verb::reject, Verb::revoke, Verb::edit};
    const Verb verb = kVerbs[pick(4)];
    auto& sh = shadow_.at(id);

    workflow::ReviewAction a;
    a.target_id = id;
    a.verb = verb;
    const bool is_scenario = p_.find_scenario(id) != nullptr;
    if (verb == Verb::edit) {
      if (is_scenario) {
        a.name = "edited " + std::to_string(counter_);
        a.description = "edited description";
      } else {
        a.text = "def test_edited_" + std::to_string(counter_) + "():\n    pass\n";
      }
    }
    const bool legal = verb == Verb::revoke ? sh.state == ReviewState::rejected : sh.state != ReviewState::rejected;
    const Project before = p_;
    try {
      workflow::apply_review(p_, a, clock_);
    } catch (const Error& e) {
      if (legal) return fail("legal " + std::string(to_string(verb)) + " on " + id + " threw " + e.what());
      if (e.code() != ErrorCode::illegal_transition) return fail("wrong error code for illegal verb");
      if (!(p_ == before)) return fail("illegal " + std::string(to_string(verb)) + " mutated the project");
      return {};
    }
    if (!legal) return fail("illegal " + std::string(to_string(verb)) + " on " + id + " was accepted");

    switch (verb) {
      case Verb::accept: sh.state = ReviewState::accepted; break;
      case Verb::reject:
        sh.pre_reject_text = sh.text;
        sh.state = ReviewState::rejected;
        break;
      case Verb::revoke:
        sh.state = ReviewState::pending;
        if (text_of(id) != sh.pre_reject_text) return fail("revoke on " + id + " did not restore the text");
        break;
      case Verb::edit:
        sh.state = ReviewState::accepted;
        if (sh.provenance == Provenance::llm) sh.provenance = Provenance::llm_edited;
        sh.text = is_scenario ? agents::scenario_prompt_text(*a.name, *a.description) : *a.text;
        break;
      case Verb::add: break;
    }
    return {};
  }

  std::string check() const {
    for (const auto& [id, sh] : shadow_) {
      ReviewState state;
      Provenance prov;
      std::string text;
      bool original_ok;
      std::size_t history;
      if (const auto* s = p_.find_scenario(id)) {
        state = s->state;
        prov = s->provenance;
        text = s->text();
        original_ok = prov == Provenance::manual ? !s->original_name.has_value()
                      : prov == Provenance::llm  ? s->original_name == s->name && s->original_description == s->description
                                                 : s->original_name.has_value();
        history = s->history.size();
      } else {
        const auto& t = p_.script(id);
        state = t.state;
        prov = t.provenance;
        text = t.text;
        original_ok = prov == Provenance::manual ? !t.original_text.has_value()
                      : prov == Provenance::llm  ? t.original_text == t.text
                                                 : t.original_text.has_value();
        history = t.history.size();
      }
      if (state != ReviewState::pending && state != ReviewState::accepted && state != ReviewState::rejected)
        return fail(id + " reached an undefined state");
      if (state != sh.state) return fail(id + " state differs from the shadow table");
      if (prov != sh.provenance) return fail(id + " provenance differs from the shadow table");
      if (text != sh.text) return fail(id + " text differs from the shadow table");
      if (!original_ok) return fail(id + " original text inconsistent with provenance");
      if (prov == Provenance::llm_edited && history == 0) return fail(id + " edited without archived text");
    }
    SummaryOracle oracle(p_);
    std::vector<std::string> ids{p_.id};
    ids.insert(ids.end(), ops_.begin(), ops_.end());
    for (const auto& s : p_.scenarios) ids.push_back(s.id);
    for (const auto& id : ids) {
      if (!(workflow::compute_summary(p_, id) == oracle.summary(id))) {
        return fail("summary of " + id + " differs from recomputation: " +
                    workflow::to_json(workflow::compute_summary(p_, id)).dump() + " vs " +
                    workflow::to_json(oracle.summary(id)).dump());
      }
    }
    return {};
  }

  std::mt19937_64 rng_;
  workflow::Clock clock_ = [] { return std::string("2024-01-01T00:00:00.000Z"); };
  Project p_;
  std::vector<std::string> ops_;
  std::map<std::string, Shadow> shadow_;
  int counter_ = 0;
  int step_ = 0;
};

}  // namespace review_model
