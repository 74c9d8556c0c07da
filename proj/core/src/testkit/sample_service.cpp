#include "restcheck/testkit/sample_service.hpp"

#include <httplib.h>

#include <map>
#include <mutex>
#include <thread>

namespace restcheck::testkit {

namespace {

struct Item {
  std::int64_t id;
  std::string name;
  double price;
};

const std::vector<Item> kInitialItems = {{1, "apple", 1.5}, {2, "pear", 2.0}};

Json item_json(const Item& it, bool drop_name) {
  Json j{{"id", it.id}, {"name", it.name}, {"price", it.price}};
  if (drop_name) j.erase("name");
  return j;
}

Json message(const std::string& text) { return Json{{"message", text}}; }

}  // namespace

std::string_view to_string(FaultKind k) noexcept {
  switch (k) {
    case FaultKind::wrong_status: return "wrong-status";
    case FaultKind::schema_violation: return "schema-violation";
    case FaultKind::undeclared_code: return "undeclared-code";
  }
  return "unknown";
}

std::vector<Fault> parse_fault_plan(const Json& plan) {
  if (!plan.is_array()) throw Error(ErrorCode::validation, "fault plan must be a list");
  std::vector<Fault> out;
  for (const auto& f : plan) {
    Fault fault;
    fault.endpoint = f.at("endpoint").get<std::string>();
    const auto kind = f.at("fault").get<std::string>();
    if (kind == "wrong-status") {
      fault.kind = FaultKind::wrong_status;
      fault.status = 404;
    } else if (kind == "schema-violation") {
      fault.kind = FaultKind::schema_violation;
    } else if (kind == "undeclared-code") {
      fault.kind = FaultKind::undeclared_code;
    } else {
      throw Error(ErrorCode::validation, "unknown fault '" + kind + "'");
    }
    fault.status = f.value("status", fault.status);
    fault.nth = f.value("nth", 0);
    out.push_back(std::move(fault));
  }
  return out;
}

struct SampleService::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::string host;
  mutable std::mutex mutex;
  std::vector<Fault> faults;
  std::vector<Item> items = kInitialItems;
  std::int64_t next_id = 3;
  std::map<std::string, int> calls;
  int total = 0;

  // Fault for this call of `endpoint`, if any. Caller holds the mutex.
  const Fault* fault_for(const std::string& endpoint) {
    const int n = ++calls[endpoint];
    ++total;
    for (const auto& f : faults) {
      if (f.endpoint == endpoint && (f.nth == 0 || f.nth == n)) return &f;
    }
    return nullptr;
  }

  void routes() {
    server.Get("/items", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const auto* f = fault_for("GET /items");
      if (f != nullptr && f->kind != FaultKind::schema_violation) {
        res.status = f->status;
        res.set_content(message("injected fault").dump(), "application/json");
        return;
      }
      Json out = Json::array();
      for (const auto& it : items) {
        if (!req.has_param("name") || req.get_param_value("name") == it.name) {
          out.push_back(item_json(it, f != nullptr));
        }
      }
      if (out.empty() && req.has_param("name")) {
        res.status = 404;
        res.set_content(message("no item named " + req.get_param_value("name")).dump(), "application/json");
        return;
      }
      res.status = 200;
      res.set_content(out.dump(), "application/json");
    });

    server.Get(R"(/items/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const auto* f = fault_for("GET /items/{itemId}");
      if (f != nullptr && f->kind != FaultKind::schema_violation) {
        res.status = f->status;
        res.set_content(message("injected fault").dump(), "application/json");
        return;
      }
      const std::string raw = req.matches[1];
      std::int64_t id = 0;
      try {
        std::size_t used = 0;
        id = std::stoll(raw, &used);
        if (used != raw.size()) id = 0;
      } catch (const std::exception&) {
        id = 0;
      }
      for (const auto& it : items) {
        if (it.id == id) {
          res.status = 200;
          res.set_content(item_json(it, f != nullptr).dump(), "application/json");
          return;
        }
      }
      res.status = 404;
      res.set_content(message("item " + raw + " not found").dump(), "application/json");
    });

    server.Post("/items", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const auto* f = fault_for("POST /items");
      if (f != nullptr && f->kind != FaultKind::schema_violation) {
        res.status = f->status;
        res.set_content(message("injected fault").dump(), "application/json");
        return;
      }
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const nlohmann::json::exception&) {
        body = nullptr;
      }
      const bool ok = body.is_object() && body.contains("name") && body["name"].is_string() &&
                      !body["name"].get<std::string>().empty() && body.contains("price") &&
                      body["price"].is_number() && body["price"].get<double>() >= 0;
      if (!ok) {
        res.status = 400;
        res.set_content(message("invalid item").dump(), "application/json");
        return;
      }
      Item it{next_id++, body["name"].get<std::string>(), body["price"].get<double>()};
      items.push_back(it);
      res.status = 201;
      res.set_content(item_json(it, f != nullptr).dump(), "application/json");
    });
  }
};

SampleService::SampleService(std::vector<Fault> faults) : impl_(std::make_unique<Impl>()) {
  impl_->faults = std::move(faults);
  impl_->routes();
}

SampleService::~SampleService() { stop(); }

int SampleService::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::internal, "sample service cannot bind " + host + ":" + std::to_string(port));
  impl_->port = bound;
  impl_->host = host;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void SampleService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void SampleService::reset() {
  std::lock_guard lock(impl_->mutex);
  impl_->items = kInitialItems;
  impl_->next_id = 3;
  impl_->calls.clear();
  impl_->total = 0;
}

void SampleService::set_faults(std::vector<Fault> faults) {
  std::lock_guard lock(impl_->mutex);
  impl_->faults = std::move(faults);
}

std::string SampleService::base_url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

int SampleService::port() const noexcept { return impl_->port; }

int SampleService::request_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->total;
}

}  // namespace restcheck::testkit
