#pragma once

#include "restcheck/metrics/metrics.hpp"
#include "restcheck/workflow/project.hpp"

namespace restcheck::metrics {

/// Collects the metric sets from the current project state.
///
/// Received status codes per operation are the union of the codes captured
/// by executions of final scripts and the observed codes of their
/// status-code reports.
MetricInputs build_inputs(const workflow::Project& p);

/// evaluate(build_inputs(p), p.id, computed_at)
std::vector<MetricRecord> evaluate_project(const workflow::Project& p, const std::string& computed_at);

/// Api-scope records of `records` keyed as in default_columns(), values as presented.
TableRow table_row(const std::string& api, std::span<const MetricRecord> records, const std::string& scope);

}  // namespace restcheck::metrics
