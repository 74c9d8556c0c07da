#include "restcheck/service/http_api.hpp"

#include <httplib.h>

#include <map>
#include <thread>

namespace restcheck::service {

namespace {

constexpr const char* kJson = "application/json";
// Written as ":/" because httplib treats any pattern containing "/:" as a
// path-parameter route instead of a regex.
constexpr const char* kId = "([^:/]+)";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::validation, std::string("request body is not JSON: ") + e.what());
  }
}

}  // namespace

struct HttpApi::Impl {
  Service& service;
  TaskManager tasks;
  httplib::Server server;
  std::thread thread;
  std::mutex idem_mutex;
  std::map<std::string, std::pair<int, std::string>> idempotent;

  Impl(Service& s, int workers) : service(s), tasks(workers) { routes(); }

  using Handler = std::function<std::pair<int, Json>(const httplib::Request&)>;

  httplib::Server::Handler wrap(Handler h) {
    return [this, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      std::string key;
      if (req.method == "POST" && req.has_header("Idempotency-Key")) {
        key = req.path + "\n" + req.get_header_value("Idempotency-Key");
        std::lock_guard lock(idem_mutex);
        if (auto it = idempotent.find(key); it != idempotent.end()) {
          res.status = it->second.first;
          res.set_content(it->second.second, kJson);
          return;
        }
      }
      int status = 200;
      Json body;
      try {
        std::tie(status, body) = h(req);
      } catch (const Error& e) {
        status = http_status(e.code());
        body = error_envelope(e);
      } catch (const std::exception& e) {
        status = 500;
        body = Json{{"code", "internal"}, {"message", e.what()}, {"details", nullptr}};
      }
      reply(res, status, body);
      if (!key.empty() && status < 500) {
        std::lock_guard lock(idem_mutex);
        idempotent.emplace(key, std::make_pair(status, res.body));
      }
    };
  }

  std::pair<int, Json> enqueue(TaskRequest r) {
    service.check_gate(r);
    auto kind = std::string(to_string(r.kind));
    auto target = r.target;
    auto id = tasks.submit(kind, target, [this, r = std::move(r)] { return service.run_task(r); });
    return {202, Json{{"task_id", id}, {"kind", kind}, {"target", target}}};
  }

  void get(const std::string& pattern, Handler h) { server.Get(pattern, wrap(std::move(h))); }
  void post(const std::string& pattern, Handler h) { server.Post(pattern, wrap(std::move(h))); }

  void routes() {
    const std::string id = kId;
    get("/health", [](const auto&) { return std::pair{200, Json{{"status", "ok"}}}; });

    post("/projects", [this](const httplib::Request& req) {
      Json b = body_of(req);
      if (!b.contains("source") || !b.at("source").is_string()) {
        throw Error(ErrorCode::validation, "'source' (URL or file path) is required");
      }
      return std::pair{201, service.create_project(b.at("source").get<std::string>(), b.value("host_url", ""))};
    });
    get("/projects", [this](const auto&) { return std::pair{200, service.list_projects()}; });
    post("/projects:import", [this](const httplib::Request& req) {
      return std::pair{201, service.import_project(body_of(req))};
    });
    get("/projects/" + id, [this](const httplib::Request& req) { return std::pair{200, service.project(req.matches[1])}; });
    get("/projects/" + id + "/tree", [this](const httplib::Request& req) {
      return std::pair{200, service.tree(req.matches[1])};
    });
    get("/projects/" + id + "/entities", [this](const httplib::Request& req) {
      return std::pair{200, service.entities(req.matches[1])};
    });
    get("/projects/" + id + "/export", [this](const httplib::Request& req) {
      return std::pair{200, service.export_bundle(req.matches[1])};
    });
    post("/projects/" + id + "/system-scenarios:generate", [this](const httplib::Request& req) {
      Json b = body_of(req);
      TaskRequest r{TaskKind::system_scenarios, req.matches[1], {}};
      if (b.contains("operation_ids")) r.operation_ids = b.at("operation_ids").get<std::vector<std::string>>();
      return enqueue(std::move(r));
    });

    for (const char* kind : {"projects", "operations", "scenarios"}) {
      get(std::string("/") + kind + "/" + id + "/summary", [this](const httplib::Request& req) {
        return std::pair{200, service.summary(req.matches[1])};
      });
    }
    for (const char* kind : {"projects", "operations"}) {
      get(std::string("/") + kind + "/" + id + "/metrics", [this](const httplib::Request& req) {
        return std::pair{200, service.metrics(req.matches[1])};
      });
    }

    get("/operations/" + id, [this](const httplib::Request& req) {
      return std::pair{200, service.operation(req.matches[1])};
    });
    post("/operations/" + id + "/unit-scenarios:generate", [this](const httplib::Request& req) {
      return enqueue(TaskRequest{TaskKind::unit_scenarios, req.matches[1], {}});
    });

    post("/scenarios", [this](const httplib::Request& req) { return std::pair{201, service.add_scenario(body_of(req))}; });
    get("/scenarios/" + id, [this](const httplib::Request& req) {
      return std::pair{200, service.scenario(req.matches[1])};
    });
    post("/scenarios/" + id + "/review", [this](const httplib::Request& req) {
      return std::pair{200, service.review(req.matches[1], body_of(req))};
    });
    post("/scenarios/" + id + "/scripts:generate", [this](const httplib::Request& req) {
      return enqueue(TaskRequest{TaskKind::script, req.matches[1], {}});
    });

    post("/scripts", [this](const httplib::Request& req) { return std::pair{201, service.add_script(body_of(req))}; });
    get("/scripts/" + id, [this](const httplib::Request& req) { return std::pair{200, service.script(req.matches[1])}; });
    post("/scripts/" + id + "/review", [this](const httplib::Request& req) {
      return std::pair{200, service.review(req.matches[1], body_of(req))};
    });
    post("/scripts/" + id + ":syntax-check", [this](const httplib::Request& req) {
      return enqueue(TaskRequest{TaskKind::syntax_check, req.matches[1], {}});
    });
    post("/scripts/" + id + ":execute", [this](const httplib::Request& req) {
      return enqueue(TaskRequest{TaskKind::execute, req.matches[1], {}});
    });
    post("/scripts/" + id + "/checks:(data-type|method-coverage|status-code)", [this](const httplib::Request& req) {
      const std::string which = req.matches[2];
      TaskKind kind = which == "data-type"         ? TaskKind::data_type_check
                      : which == "method-coverage" ? TaskKind::method_coverage_check
                                                   : TaskKind::status_code_check;
      return enqueue(TaskRequest{kind, req.matches[1], {}});
    });
    post("/scripts/" + id + "/data-type-verdict", [this](const httplib::Request& req) {
      return std::pair{200, service.set_data_type_verdict(req.matches[1], body_of(req))};
    });

    get("/executions/" + id, [this](const httplib::Request& req) {
      return std::pair{200, service.execution(req.matches[1])};
    });

    get("/tasks/" + id, [this](const httplib::Request& req) {
      const std::string tid = req.matches[1];
      std::optional<TaskInfo> t;
      if (req.has_param("wait")) {
        double secs = 0;
        try {
          secs = std::stod(req.get_param_value("wait"));
        } catch (const std::exception&) {
          throw Error(ErrorCode::validation, "'wait' must be a number of seconds");
        }
        t = tasks.wait(tid, std::chrono::milliseconds(static_cast<long long>(std::clamp(secs, 0.0, 300.0) * 1000)));
      } else {
        t = tasks.get(tid);
      }
      if (!t) throw Error(ErrorCode::not_found, "task " + tid + " not found");
      return std::pair{200, to_json(*t)};
    });
  }
};

HttpApi::HttpApi(Service& service, int workers) : impl_(std::make_unique<Impl>(service, workers)) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::internal, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpApi::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::internal, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpApi::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

TaskManager& HttpApi::tasks() noexcept { return impl_->tasks; }

}  // namespace restcheck::service
