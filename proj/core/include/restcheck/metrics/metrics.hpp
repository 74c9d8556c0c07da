#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "restcheck/error.hpp"

namespace restcheck::metrics {

/// Character-level edit distance (insert, delete, substitute), two-row DP.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// One computed value with the counts behind it.
struct MetricRecord {
  std::string metric;   // Cor_Syn, Cor_DT, Usability, Cov_US_op, Cov_US_api, Cov_SS, Cov_Ops, Cov_SCode
  std::string variant;  // "" or "strict" (Usability), "summed" (api-level Cov_SCode)
  std::string scope;    // project or operation id
  std::optional<double> value;  // nullopt when undefined
  double numerator = 0;
  double denominator = 0;
  std::string note;  // reason when undefined
  std::string computed_at;

  bool operator==(const MetricRecord&) const = default;
};

struct Ratio {
  double numerator = 0;
  double denominator = 0;
  double value = 0;
};

/// Set-level inputs, all by entity id.
struct MetricInputs {
  std::set<std::string> t_llm;  // LLM-originated scripts (llm or llm-edited), not rejected
  std::set<std::string> t_fin;  // final (non-rejected) scripts
  std::map<std::string, bool> valid_syn;                 // verdict on the original LLM text
  std::map<std::string, std::optional<bool>> valid_dt;   // human-confirmed
  std::map<std::string, std::string> original_text;      // t in T_LLM -> generated text
  std::map<std::string, std::string> final_text;         // t in T_LLM -> final text t'
  std::map<std::string, std::set<std::string>> s_llm;    // op -> llm scenarios accepted unmodified
  std::map<std::string, std::set<std::string>> s_fin;    // op -> final unit scenarios
  std::set<std::string> s_llm_sys;
  std::set<std::string> s_fin_sys;
  std::set<std::string> ops;                             // Ops(api)
  std::map<std::string, std::set<std::string>> ops_of_final_system_scripts;  // t -> operations in scope
  std::map<std::string, std::set<std::string>> code_exp;  // op -> declared numeric codes
  std::map<std::string, std::set<std::string>> code_rec;  // op -> received codes (unfiltered)
};

// Each throws Error(undefined_metric) when its denominator set is empty.
Ratio syntax_correctness(const MetricInputs& in);          // |valid syn in T_LLM| / |T_LLM|
Ratio data_type_correctness(const MetricInputs& in);       // throws incomplete_inputs for unconfirmed verdicts
Ratio usability(const MetricInputs& in);                   // sum over T_LLM / |T_Fin|
Ratio usability_strict(const MetricInputs& in);            // sum over T_LLM / |T_LLM|
Ratio unit_scenario_coverage(const MetricInputs& in, const std::string& op);
Ratio unit_scenario_coverage_api(const MetricInputs& in);  // unions over operations
Ratio system_scenario_coverage(const MetricInputs& in);
Ratio operation_coverage(const MetricInputs& in);
Ratio status_code_coverage(const MetricInputs& in, const std::string& op);  // Rec filtered to Exp
Ratio status_code_coverage_api(const MetricInputs& in);   // summed over operations with codes

/// Arithmetic mean rounded to `decimals`. Throws Error(precondition) when empty.
double mean_over_apis(std::span<const double> values, int decimals = 2);

/// Rounds half away from zero at `decimals` places.
double round_to(double value, int decimals);

/// Every metric for `scope` (the project id); undefined ones carry a note
/// instead of failing the batch.
std::vector<MetricRecord> evaluate(const MetricInputs& in, const std::string& scope, const std::string& computed_at);

Json to_json(const MetricRecord& m);
MetricRecord metric_record_from_json(const Json& j);
Json to_json(std::span<const MetricRecord> records);

/// One API row of a comparison table: metric name -> value as presented
/// (percent for ratios, raw distance for Usability).
struct TableRow {
  std::string api;
  std::map<std::string, std::optional<double>> values;
};

/// True for metrics presented as raw numbers rather than percentages.
bool is_distance_metric(std::string_view metric);

/// Presentation value of a record: ratio x 100, or the raw distance.
std::optional<double> presented(const MetricRecord& m);

/// Plain-text table: one row per API, one column per metric, and an
/// Average row computed with mean_over_apis over the defined cells.
std::string render_table(std::span<const TableRow> rows, std::span<const std::string> columns);

/// The api-scope columns in table order.
std::vector<std::string> default_columns();

}  // namespace restcheck::metrics
