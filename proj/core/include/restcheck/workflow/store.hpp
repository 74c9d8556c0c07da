#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "restcheck/workflow/project.hpp"

namespace restcheck::workflow {

/// Export bundle layout version. Bumped on any incompatible change.
inline constexpr int kBundleVersion = 1;

/// Single JSON document holding every entity of a project:
///
///   {"format": "restcheck-project", "version": 1,
///    "project": {id, source, host_url, created_at, counters},
///    "spec": {source, title, version_tag, host_url, document, operations},
///    "scenarios": [...], "scripts": [...], "executions": [...],
///    "metric_records": [...], "actions": [...], "completions": [...]}
///
/// "spec.operations" is informational; import re-parses "spec.document".
Json to_bundle(const Project& p);

/// Throws Error(version_mismatch) for another format version and
/// Error(validation) for a malformed bundle.
Project from_bundle(const Json& bundle);

Json to_json(const TestScenario& s);
Json to_json(const TestScript& t);
Json to_json(const ReviewAction& a);
Json to_json(const llm::CompletionRecord& c);
TestScenario scenario_from_json(const Json& j);
TestScript script_from_json(const Json& j);
ReviewAction action_from_json(const Json& j);
llm::CompletionRecord completion_from_json(const Json& j);

class ProjectStore {
 public:
  virtual ~ProjectStore() = default;
  /// Replaces the stored copy. Saving an unchanged project is a no-op.
  virtual void save(const Project& p) = 0;
  /// Throws Error(not_found) for unknown ids.
  virtual Project load(std::string_view id) = 0;
  virtual std::vector<std::string> list() = 0;
};

/// Keeps serialized bundles, so loads never alias live objects.
class InMemoryStore : public ProjectStore {
 public:
  void save(const Project& p) override;
  Project load(std::string_view id) override;
  std::vector<std::string> list() override;

 private:
  std::mutex mutex_;
  std::map<std::string, std::string, std::less<>> bundles_;
};

/// SQLite file store: one table per entity type plus the action log,
/// rows keyed by (project_id, id) holding the entity JSON.
class SqliteStore : public ProjectStore {
 public:
  /// Opens or creates the database. Throws Error(store_unavailable).
  explicit SqliteStore(const std::string& path);
  ~SqliteStore() override;
  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  void save(const Project& p) override;
  Project load(std::string_view id) override;
  std::vector<std::string> list() override;

 private:
  struct Db;
  std::unique_ptr<Db> db_;
  std::mutex mutex_;
};

/// ":memory:" gives an InMemoryStore, anything else a SqliteStore file.
std::unique_ptr<ProjectStore> open_store(const std::string& location);

}  // namespace restcheck::workflow
