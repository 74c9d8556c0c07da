#include "restcheck/error.hpp"

namespace restcheck {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::spec_unreachable: return "spec_unreachable";
    case ErrorCode::spec_not_json: return "spec_not_json";
    case ErrorCode::spec_no_paths: return "spec_no_paths";
    case ErrorCode::spec_no_operations: return "spec_no_operations";
    case ErrorCode::dangling_ref: return "dangling_ref";
    case ErrorCode::unbound_variable: return "unbound_variable";
    case ErrorCode::template_store: return "template_store";
    case ErrorCode::llm_timeout: return "llm_timeout";
    case ErrorCode::llm_http_status: return "llm_http_status";
    case ErrorCode::llm_empty_response: return "llm_empty_response";
    case ErrorCode::llm_transport: return "llm_transport";
    case ErrorCode::llm_unmatched: return "llm_unmatched";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::prompt_too_large: return "prompt_too_large";
    case ErrorCode::empty_scenario_list: return "empty_scenario_list";
    case ErrorCode::report_parse: return "report_parse";
    case ErrorCode::report_shape: return "report_shape";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::illegal_transition: return "illegal_transition";
    case ErrorCode::validation: return "validation";
    case ErrorCode::stage_gate: return "stage_gate";
    case ErrorCode::store_unavailable: return "store_unavailable";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::runner_config: return "runner_config";
    case ErrorCode::runner_failure: return "runner_failure";
    case ErrorCode::undefined_metric: return "undefined_metric";
    case ErrorCode::incomplete_inputs: return "incomplete_inputs";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

}  // namespace restcheck
