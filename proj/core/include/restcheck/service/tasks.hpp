#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "restcheck/error.hpp"

namespace restcheck::service {

enum class TaskState { queued, running, succeeded, failed };

std::string_view to_string(TaskState s) noexcept;

struct TaskInfo {
  std::string id;
  std::string kind;
  std::string target;
  TaskState state = TaskState::queued;
  Json result;  // set on success
  Json error;   // {code, message, details} on failure
};

Json to_json(const TaskInfo& t);

/// Fixed worker pool running queued jobs in submission order.
class TaskManager {
 public:
  explicit TaskManager(int workers);
  ~TaskManager();  // finishes running jobs, drops queued ones
  TaskManager(const TaskManager&) = delete;
  TaskManager& operator=(const TaskManager&) = delete;

  /// Returns the task id ("t1", "t2", ...).
  std::string submit(std::string kind, std::string target, std::function<Json()> job);
  std::optional<TaskInfo> get(const std::string& id) const;
  /// Blocks until the task finishes or the timeout elapses.
  std::optional<TaskInfo> wait(const std::string& id, std::chrono::milliseconds timeout) const;

 private:
  void worker();

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::deque<std::pair<std::string, std::function<Json()>>> queue_;
  std::map<std::string, TaskInfo> tasks_;
  std::vector<std::thread> threads_;
  std::uint64_t next_ = 1;
  bool stopping_ = false;
};

}  // namespace restcheck::service
