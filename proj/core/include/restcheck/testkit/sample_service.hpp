#pragma once

#include <memory>
#include <string>
#include <vector>

#include "restcheck/error.hpp"

namespace restcheck::testkit {

enum class FaultKind {
  wrong_status,      // a declared but wrong code (404 for a successful lookup)
  schema_violation,  // drops the required "name" field from item bodies
  undeclared_code,   // answers with a code the operation does not declare
};

std::string_view to_string(FaultKind k) noexcept;  // "wrong-status", ...

struct Fault {
  std::string endpoint;  // "GET /items", "GET /items/{itemId}", "POST /items"
  FaultKind kind = FaultKind::undeclared_code;
  int status = 500;      // used by undeclared_code and wrong_status
  int nth = 0;           // 0 = every call, n = only the n-th call
};

/// [{"endpoint": "GET /items", "fault": "undeclared-code", "status": 500, "nth": 0}]
std::vector<Fault> parse_fault_plan(const Json& plan);

/// The items service described by fixtures/specs/items.json. Items 1 (apple)
/// and 2 (pear) exist initially. Without faults every response conforms to
/// the declared spec.
class SampleService {
 public:
  explicit SampleService(std::vector<Fault> faults = {});
  ~SampleService();
  SampleService(const SampleService&) = delete;
  SampleService& operator=(const SampleService&) = delete;

  /// Serves on a background thread; port 0 picks a free port. Returns the
  /// bound port. Throws Error(internal) when the port is unavailable.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  /// Restores the initial items and call counters.
  void reset();
  void set_faults(std::vector<Fault> faults);

  std::string base_url() const;
  int port() const noexcept;
  int request_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace restcheck::testkit
