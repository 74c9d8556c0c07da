#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace restcheck {

// Documents keep key order so operation extraction follows the source file.
using Json = nlohmann::ordered_json;

enum class ErrorCode {
  // spec_model
  spec_unreachable,
  spec_not_json,
  spec_no_paths,
  spec_no_operations,
  dangling_ref,
  // llm_gateway
  unbound_variable,
  template_store,
  llm_timeout,
  llm_http_status,
  llm_empty_response,
  llm_transport,
  llm_unmatched,
  invalid_config,
  // agents
  prompt_too_large,
  empty_scenario_list,
  report_parse,
  report_shape,
  // workflow / service
  not_found,
  illegal_transition,
  validation,
  stage_gate,
  store_unavailable,
  version_mismatch,
  // executor
  runner_config,
  runner_failure,
  // metrics
  undefined_metric,
  incomplete_inputs,
  precondition,
  internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library. `code()` is the machine-readable
/// tag that also appears in the HTTP error envelope; `details()` carries
/// structured context (raw completions, offending ids, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const Json& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  Json details_;
};

}  // namespace restcheck
