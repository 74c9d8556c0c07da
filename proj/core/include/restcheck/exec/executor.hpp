#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "restcheck/error.hpp"
#include "restcheck/spec/spec_model.hpp"

namespace restcheck::exec {

enum class Outcome { passed, failed, error };

std::string_view to_string(Outcome o) noexcept;
Outcome parse_outcome(std::string_view text);

struct CapturedResponse {
  std::string method;
  std::string path;
  int status = 0;
  std::string body_digest;

  bool operator==(const CapturedResponse&) const = default;
};

struct TestCaseResult {
  std::string name;
  Outcome outcome = Outcome::error;
  std::string message;
  std::vector<CapturedResponse> responses;

  bool operator==(const TestCaseResult&) const = default;
};

enum class BugCategory { functional_error, spec_inconsistency, undefined_status_code };

std::string_view to_string(BugCategory c) noexcept;
BugCategory parse_bug_category(std::string_view text);

struct BugItem {
  std::string case_name;
  BugCategory category = BugCategory::functional_error;
  std::string evidence;

  bool operator==(const BugItem&) const = default;
};

struct BugTally {
  int total = 0;
  int functional_error = 0;
  int spec_inconsistency = 0;
  int undefined_status_code = 0;
  std::vector<BugItem> items;

  bool operator==(const BugTally&) const = default;
};

struct ExecutionResult {
  std::string id;
  std::string script_id;
  std::string started_at;
  std::string finished_at;
  std::optional<int> exit_code;  // absent when the runner was killed
  bool timed_out = false;
  std::string report_error;      // set when no usable report was produced
  std::vector<TestCaseResult> cases;
  std::map<std::string, std::set<int>> observed_status_codes;  // endpoint key -> codes
  BugTally bugs;
  std::string raw_output;

  bool all_passed() const;
  bool operator==(const ExecutionResult&) const = default;
};

/// Syntax verdicts: `unknown` means the check itself did not finish.
enum class SyntaxVerdict { valid, invalid, unknown };

std::string_view to_string(SyntaxVerdict v) noexcept;

struct SyntaxCheck {
  SyntaxVerdict verdict = SyntaxVerdict::unknown;
  std::string output;
};

struct RunnerConfig {
  /// Shell command templates. {script} and {report} are replaced by
  /// shell-quoted absolute paths inside the run directory.
  std::string syntax_check_command = "python3 -m py_compile {script}";
  std::string run_command;
  std::string work_root;  // parent of the per-run directories
  double timeout_seconds = 120.0;
  std::vector<std::string> env_allow = {"PATH", "HOME", "LANG", "LC_ALL", "PYTHONPATH"};
  std::map<std::string, std::string> env;  // always exported

  void validate() const;

  /// run_command = python3 <runner_dir>/run_pytest.py {script} {report}
  static RunnerConfig pytest(const std::string& runner_dir, const std::string& work_root);
  static RunnerConfig from_json(const Json& j, const std::string& default_runner_dir);
  Json to_json() const;
};

/// Parses the runner report: an array of
/// {name, outcome, message, responses:[{method, path, status, body_digest}]}.
/// Throws Error(runner_failure) on a malformed report.
std::vector<TestCaseResult> parse_runner_report(std::string_view text);

/// Maps a concrete request path (with the host base path already stripped)
/// onto an operation key. Prefers the template with more literal segments.
std::optional<std::string> match_operation(std::span<const spec::ApiOperation> ops, std::string_view method,
                                           std::string_view path);

/// Groups captured status codes by operation key. Responses that do not map
/// onto an operation are left out.
std::map<std::string, std::set<int>> observed_codes(std::span<const TestCaseResult> cases,
                                                    std::span<const spec::ApiOperation> ops,
                                                    std::string_view base_path);

/// One bug per failed case. A captured code the endpoint does not declare
/// makes it an undefined-status-code bug; otherwise a failure message about
/// status_code is a functional error, one about schema/fields a
/// spec inconsistency, anything else a functional error.
BugTally tally_bugs(std::span<const TestCaseResult> cases, std::span<const spec::ApiOperation> ops,
                    std::string_view base_path);

/// Pass rate over executed cases. Throws Error(undefined_metric) for none.
double correctness_score(const ExecutionResult& result);

/// Runs shell commands in fresh per-run directories under work_root.
class Executor {
 public:
  explicit Executor(RunnerConfig config);

  /// Writes the script into a fresh directory and runs the syntax command.
  /// Exit 0 is valid, 127 throws Error(runner_config), a timeout is unknown.
  SyntaxCheck syntax_check(std::string_view script_text);

  /// Runs the script with API_BASE_URL=host_url exported, parses the report,
  /// maps captured responses onto `ops` and tallies bugs.
  ExecutionResult execute(std::string_view script_text, std::span<const spec::ApiOperation> ops,
                          std::string_view host_url);

  const RunnerConfig& config() const noexcept { return config_; }

 private:
  std::string fresh_dir();

  RunnerConfig config_;
  unsigned long long runs_ = 0;
};

Json to_json(const ExecutionResult& r);
ExecutionResult execution_from_json(const Json& j);

/// Compact text fed to the dynamic status-code checker as {{execution_result}}.
std::string execution_summary_text(const ExecutionResult& r);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp();

}  // namespace restcheck::exec
