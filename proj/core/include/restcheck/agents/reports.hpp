#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "restcheck/error.hpp"

namespace restcheck::agents {

/// Rounds to two decimals, the presentation precision used by every report.
double round2(double value);

struct EndpointTypeCoverage {
  int matched = 0;
  int total = 0;
  double coverage_percent = 100.0;  // recomputed: 100 when total == 0
  std::optional<double> stated_percent;
  std::vector<std::string> mismatches;

  bool operator==(const EndpointTypeCoverage&) const = default;
};

/// Parameter data-type check. All percentages are recomputed from the
/// counts; the model's own numbers are kept in `stated_*` for audit only.
struct DataTypeReport {
  double coverage_percent = 100.0;
  std::optional<double> stated_coverage;
  std::map<std::string, EndpointTypeCoverage> per_endpoint;
  std::vector<std::string> warnings;

  /// True when every scenario-required parameter matched.
  bool all_matched() const;

  bool operator==(const DataTypeReport&) const = default;
};

struct MethodCoverageReport {
  std::optional<double> coverage_percent;  // nullopt when nothing was expected
  std::optional<double> stated_coverage;
  std::vector<std::string> expected;
  std::vector<std::string> used_in_script;
  std::vector<std::string> warnings;

  bool operator==(const MethodCoverageReport&) const = default;
};

enum class StatusCodeMode { static_script, dynamic_execution };

std::string_view to_string(StatusCodeMode mode) noexcept;

struct EndpointCodes {
  std::vector<std::string> expected;
  std::vector<std::string> observed;
  std::optional<double> stated_percent;

  bool operator==(const EndpointCodes&) const = default;
};

struct StatusCodeReport {
  StatusCodeMode mode = StatusCodeMode::static_script;
  std::optional<double> coverage_percent;  // nullopt = undefined (nothing expected)
  std::optional<double> stated_coverage;
  std::map<std::string, EndpointCodes> per_endpoint;
  std::vector<std::string> warnings;

  bool operator==(const StatusCodeReport&) const = default;
};

/// Normalizes "get   /pets " to "GET /pets".
std::string normalize_endpoint(std::string_view text);

/// Removes a leading ```lang line and a trailing ``` line, nothing else.
std::string strip_code_fences(std::string_view text);

/// Parsers for the checker JSON formats. They accept the model output
/// verbatim (optionally fenced), validate the shape and recompute every
/// percentage. Throw Error(report_parse) for non-JSON and
/// Error(report_shape) for missing keys; both carry the raw text.
DataTypeReport parse_data_type_report(std::string_view completion);
MethodCoverageReport parse_method_coverage_report(std::string_view completion);
StatusCodeReport parse_status_code_report(std::string_view completion, StatusCodeMode mode);

Json to_json(const DataTypeReport& r);
Json to_json(const MethodCoverageReport& r);
Json to_json(const StatusCodeReport& r);
DataTypeReport data_type_report_from_json(const Json& j);
MethodCoverageReport method_coverage_report_from_json(const Json& j);
StatusCodeReport status_code_report_from_json(const Json& j);

}  // namespace restcheck::agents
