#include "restcheck/service/tasks.hpp"

#include "restcheck/service/service.hpp"

namespace restcheck::service {

std::string_view to_string(TaskState s) noexcept {
  switch (s) {
    case TaskState::queued: return "queued";
    case TaskState::running: return "running";
    case TaskState::succeeded: return "succeeded";
    case TaskState::failed: return "failed";
  }
  return "unknown";
}

Json to_json(const TaskInfo& t) {
  return Json{{"id", t.id},
              {"kind", t.kind},
              {"target", t.target},
              {"state", std::string(to_string(t.state))},
              {"result", t.result},
              {"error", t.error}};
}

TaskManager::TaskManager(int workers) {
  for (int i = 0; i < std::max(workers, 1); ++i) threads_.emplace_back([this] { worker(); });
}

TaskManager::~TaskManager() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  changed_.notify_all();
  for (auto& t : threads_) t.join();
}

std::string TaskManager::submit(std::string kind, std::string target, std::function<Json()> job) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "t" + std::to_string(next_++);
    tasks_[id] = TaskInfo{id, std::move(kind), std::move(target), TaskState::queued, nullptr, nullptr};
    queue_.emplace_back(id, std::move(job));
  }
  changed_.notify_all();
  return id;
}

std::optional<TaskInfo> TaskManager::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = tasks_.find(id);
  if (it == tasks_.end()) return std::nullopt;
  return it->second;
}

std::optional<TaskInfo> TaskManager::wait(const std::string& id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  auto done = [&] {
    auto it = tasks_.find(id);
    return it == tasks_.end() || it->second.state == TaskState::succeeded || it->second.state == TaskState::failed;
  };
  changed_.wait_for(lock, timeout, done);
  auto it = tasks_.find(id);
  if (it == tasks_.end()) return std::nullopt;
  return it->second;
}

void TaskManager::worker() {
  for (;;) {
    std::pair<std::string, std::function<Json()>> item;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      item = std::move(queue_.front());
      queue_.pop_front();
      tasks_[item.first].state = TaskState::running;
    }
    Json result;
    Json error;
    try {
      result = item.second();
    } catch (const Error& e) {
      error = error_envelope(e);
    } catch (const std::exception& e) {
      error = Json{{"code", "internal"}, {"message", e.what()}, {"details", nullptr}};
    }
    {
      std::lock_guard lock(mutex_);
      auto& t = tasks_[item.first];
      if (error.is_null()) {
        t.state = TaskState::succeeded;
        t.result = std::move(result);
      } else {
        t.state = TaskState::failed;
        t.error = std::move(error);
      }
    }
    changed_.notify_all();
  }
}

}  // namespace restcheck::service
