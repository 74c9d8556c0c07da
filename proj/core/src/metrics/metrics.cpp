#include "restcheck/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace restcheck::metrics {

namespace {

[[noreturn]] void undefined(const std::string& what) { throw Error(ErrorCode::undefined_metric, what); }

Ratio ratio(double num, double den) { return Ratio{num, den, num / den}; }

double lev_sum(const MetricInputs& in) {
  double sum = 0;
  std::vector<std::string> unmapped;
  for (const auto& t : in.t_llm) {
    auto o = in.original_text.find(t);
    auto f = in.final_text.find(t);
    if (o == in.original_text.end() || f == in.final_text.end()) {
      unmapped.push_back(t);
      continue;
    }
    sum += static_cast<double>(levenshtein(o->second, f->second));
  }
  if (!unmapped.empty()) {
    throw Error(ErrorCode::incomplete_inputs, "scripts without an original/final text pair", Json{{"ids", unmapped}});
  }
  return sum;
}

std::set<std::string> filtered_rec(const MetricInputs& in, const std::string& op) {
  std::set<std::string> out;
  auto exp = in.code_exp.find(op);
  auto rec = in.code_rec.find(op);
  if (exp == in.code_exp.end() || rec == in.code_rec.end()) return out;
  for (const auto& c : rec->second) {
    if (exp->second.contains(c)) out.insert(c);
  }
  return out;
}



}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Ratio syntax_correctness(const MetricInputs& in) {
  if (in.t_llm.empty()) undefined("Cor_Syn: no LLM-generated scripts");
  double valid = 0;
  for (const auto& t : in.t_llm) {
    auto it = in.valid_syn.find(t);
    if (it != in.valid_syn.end() && it->second) ++valid;
  }
  return ratio(valid, static_cast<double>(in.t_llm.size()));
}

Ratio data_type_correctness(const MetricInputs& in) {
  if (in.t_llm.empty()) undefined("Cor_DT: no LLM-generated scripts");
  double valid = 0;
  std::vector<std::string> missing;
  for (const auto& t : in.t_llm) {
    auto it = in.valid_dt.find(t);
    if (it == in.valid_dt.end() || !it->second) {
      missing.push_back(t);
    } else if (*it->second) {
      ++valid;
    }
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& m : missing) ids += (ids.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::incomplete_inputs, "Cor_DT: no confirmed data-type verdict for " + ids,
                Json{{"ids", missing}});
  }
  return ratio(valid, static_cast<double>(in.t_llm.size()));
}

Ratio usability(const MetricInputs& in) {
  if (in.t_fin.empty()) undefined("Usability: no final scripts");
  return ratio(lev_sum(in), static_cast<double>(in.t_fin.size()));
}

Ratio usability_strict(const MetricInputs& in) {
  if (in.t_llm.empty()) undefined("Usability (strict): no LLM-generated scripts");
  return ratio(lev_sum(in), static_cast<double>(in.t_llm.size()));
}

Ratio unit_scenario_coverage(const MetricInputs& in, const std::string& op) {
  auto fin = in.s_fin.find(op);
  if (fin == in.s_fin.end() || fin->second.empty()) undefined("Cov_US: no final unit scenarios for " + op);
  double both = 0;
  if (auto llm = in.s_llm.find(op); llm != in.s_llm.end()) {
    for (const auto& s : llm->second) {
      if (fin->second.contains(s)) ++both;
    }
  }
  return ratio(both, static_cast<double>(fin->second.size()));
}

Ratio unit_scenario_coverage_api(const MetricInputs& in) {
  std::set<std::string> fin_union;
  std::set<std::string> both_union;
  for (const auto& op : in.ops) {
    auto fin = in.s_fin.find(op);
    if (fin == in.s_fin.end()) continue;
    fin_union.insert(fin->second.begin(), fin->second.end());
    if (auto llm = in.s_llm.find(op); llm != in.s_llm.end()) {
      for (const auto& s : llm->second) {
        if (fin->second.contains(s)) both_union.insert(s);
      }
    }
  }
  if (fin_union.empty()) undefined("Cov_US: no final unit scenarios");
  return ratio(static_cast<double>(both_union.size()), static_cast<double>(fin_union.size()));
}

Ratio system_scenario_coverage(const MetricInputs& in) {
  if (in.s_fin_sys.empty()) undefined("Cov_SS: no final system scenarios");
  double both = 0;
  for (const auto& s : in.s_fin_sys) {
    if (in.s_llm_sys.contains(s)) ++both;
  }
  return ratio(both, static_cast<double>(in.s_fin_sys.size()));
}

Ratio operation_coverage(const MetricInputs& in) {
  if (in.ops.empty()) undefined("Cov_Ops: no operations");
  std::set<std::string> covered;
  for (const auto& [t, ops] : in.ops_of_final_system_scripts) {
    if (!in.t_fin.contains(t)) continue;
    for (const auto& op : ops) {
      if (in.ops.contains(op)) covered.insert(op);
    }
  }
  return ratio(static_cast<double>(covered.size()), static_cast<double>(in.ops.size()));
}

Ratio status_code_coverage(const MetricInputs& in, const std::string& op) {
  auto exp = in.code_exp.find(op);
  if (exp == in.code_exp.end() || exp->second.empty()) {
    undefined("Cov_SCode: no enumerable status codes declared for " + op);
  }
  return ratio(static_cast<double>(filtered_rec(in, op).size()), static_cast<double>(exp->second.size()));
}

Ratio status_code_coverage_api(const MetricInputs& in) {
  double num = 0;
  double den = 0;
  for (const auto& op : in.ops) {
    auto exp = in.code_exp.find(op);
    if (exp == in.code_exp.end() || exp->second.empty()) continue;
    num += static_cast<double>(filtered_rec(in, op).size());
    den += static_cast<double>(exp->second.size());
  }
  if (den == 0) undefined("Cov_SCode: no enumerable status codes declared");
  return ratio(num, den);
}

double round_to(double value, int decimals) {
  const double f = std::pow(10.0, decimals);
  const double x = value * f;
  return std::round(x + (x >= 0 ? 1e-9 : -1e-9)) / f;
}

double mean_over_apis(std::span<const double> values, int decimals) {
  if (values.empty()) throw Error(ErrorCode::precondition, "mean over an empty list of APIs");
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return round_to(sum / static_cast<double>(values.size()), decimals);
}

std::vector<MetricRecord> evaluate(const MetricInputs& in, const std::string& scope, const std::string& computed_at) {
  std::vector<MetricRecord> out;
  auto add = [&](const char* metric, const char* variant, const std::string& sc, auto&& fn) {
    MetricRecord m{metric, variant, sc, std::nullopt, 0, 0, {}, computed_at};
    try {
      Ratio r = fn();
      m.value = r.value;
      m.numerator = r.numerator;
      m.denominator = r.denominator;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::undefined_metric && e.code() != ErrorCode::incomplete_inputs) throw;
      m.note = e.what();
    }
    out.push_back(std::move(m));
  };
  add("Cor_Syn", "", scope, [&] { return syntax_correctness(in); });
  add("Cor_DT", "", scope, [&] { return data_type_correctness(in); });
  add("Usability", "", scope, [&] { return usability(in); });
  add("Usability", "strict", scope, [&] { return usability_strict(in); });
  for (const auto& op : in.ops) add("Cov_US_op", "", op, [&] { return unit_scenario_coverage(in, op); });
  add("Cov_US_api", "", scope, [&] { return unit_scenario_coverage_api(in); });
  add("Cov_SS", "", scope, [&] { return system_scenario_coverage(in); });
  add("Cov_Ops", "", scope, [&] { return operation_coverage(in); });
  for (const auto& op : in.ops) add("Cov_SCode", "", op, [&] { return status_code_coverage(in, op); });
  add("Cov_SCode", "summed", scope, [&] { return status_code_coverage_api(in); });
  return out;
}

Json to_json(const MetricRecord& m) {
  return Json{{"metric", m.metric},
              {"variant", m.variant},
              {"scope", m.scope},
              {"value", m.value ? Json(*m.value) : Json(nullptr)},
              {"numerator", m.numerator},
              {"denominator", m.denominator},
              {"note", m.note},
              {"computed_at", m.computed_at}};
}

MetricRecord metric_record_from_json(const Json& j) {
  MetricRecord m;
  m.metric = j.at("metric").get<std::string>();
  m.variant = j.at("variant").get<std::string>();
  m.scope = j.at("scope").get<std::string>();
  if (!j.at("value").is_null()) m.value = j.at("value").get<double>();
  m.numerator = j.at("numerator").get<double>();
  m.denominator = j.at("denominator").get<double>();
  m.note = j.at("note").get<std::string>();
  m.computed_at = j.at("computed_at").get<std::string>();
  return m;
}

Json to_json(std::span<const MetricRecord> records) {
  Json arr = Json::array();
  for (const auto& m : records) {
    Json j = to_json(m);
    if (auto v = presented(m)) j["presented"] = round_to(*v, 2);
    arr.push_back(std::move(j));
  }
  return arr;
}

bool is_distance_metric(std::string_view metric) { return metric == "Usability" || metric.starts_with("Usability/"); }

std::optional<double> presented(const MetricRecord& m) {
  if (!m.value) return std::nullopt;
  return is_distance_metric(m.metric) ? *m.value : *m.value * 100.0;
}

std::vector<std::string> default_columns() {
  return {"Cov_US_api", "Cov_SS", "Cov_Ops", "Cor_Syn", "Cor_DT", "Cov_SCode/summed", "Usability"};
}

std::string render_table(std::span<const TableRow> rows, std::span<const std::string> columns) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", round_to(*v, 2));
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"API"};
  header.insert(header.end(), columns.begin(), columns.end());
  grid.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.api};
    for (const auto& c : columns) {
      auto it = r.values.find(c);
      line.push_back(cell(it == r.values.end() ? std::nullopt : it->second));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::string> avg{"Average"};
  for (const auto& c : columns) {
    std::vector<double> vals;
    for (const auto& r : rows) {
      if (auto it = r.values.find(c); it != r.values.end() && it->second) vals.push_back(*it->second);
    }
    avg.push_back(vals.empty() ? "n/a" : cell(mean_over_apis(vals)));
  }
  grid.push_back(std::move(avg));

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out += " | ";
      std::string pad(width[i] - line[i].size(), ' ');
      out += i == 0 ? line[i] + pad : pad + line[i];
    }
    out += "\n";
  };
  auto rule = [&] {
    for (std::size_t i = 0; i < width.size(); ++i) {
      if (i > 0) out += "-+-";
      out += std::string(width[i], '-');
    }
    out += "\n";
  };
  emit(grid.front());
  rule();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) emit(grid[i]);
  rule();
  emit(grid.back());
  return out;
}

}  // namespace restcheck::metrics
