#pragma once

#include <memory>
#include <string>

#include "restcheck/service/service.hpp"
#include "restcheck/service/tasks.hpp"

namespace restcheck::service {

/// HTTP JSON front end of a Service.
///
///   GET  /health
///   POST /projects                                {source, host_url?}
///   GET  /projects
///   POST /projects:import                         export bundle
///   GET  /projects/{id}[/tree|/entities|/export|/summary|/metrics]
///   POST /projects/{id}/system-scenarios:generate {operation_ids?}       -> 202 task
///   GET  /operations/{id}[/summary|/metrics]
///   POST /operations/{id}/unit-scenarios:generate                       -> 202 task
///   POST /scenarios                               {target_id, name, description, operation_ids?}
///   GET  /scenarios/{id}[/summary]
///   POST /scenarios/{id}/review                   {verb, name?, description?}
///   POST /scenarios/{id}/scripts:generate                               -> 202 task
///   POST /scripts                                 {scenario_id, text}
///   GET  /scripts/{id}
///   POST /scripts/{id}/review                     {verb, text?}
///   POST /scripts/{id}:syntax-check                                     -> 202 task
///   POST /scripts/{id}:execute                                          -> 202 task
///   POST /scripts/{id}/checks:data-type|method-coverage|status-code     -> 202 task
///   POST /scripts/{id}/data-type-verdict          {valid}
///   GET  /executions/{id}
///   GET  /tasks/{id}[?wait=seconds]
///
/// Errors use the envelope {code, message, details}. Out-of-order task
/// requests fail with 409 stage_gate before anything is queued. A POST with
/// an Idempotency-Key header replays the first response for that key.
class HttpApi {
 public:
  HttpApi(Service& service, int workers);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port;
  /// returns the bound port. Throws Error(internal) when binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  TaskManager& tasks() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace restcheck::service
