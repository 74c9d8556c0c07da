// restcheck command line: spec inspection, prompt rendering, metrics over
// exported bundles, and the HTTP service.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "restcheck/error.hpp"
#include "restcheck/llm/gateway.hpp"
#include "restcheck/llm/prompt.hpp"
#include "restcheck/metrics/metrics.hpp"
#include "restcheck/metrics/project_inputs.hpp"
#include "restcheck/service/http_api.hpp"
#include "restcheck/service/service.hpp"
#include "restcheck/spec/spec_model.hpp"
#include "restcheck/testkit/fixtures.hpp"
#include "restcheck/testkit/responder.hpp"
#include "restcheck/testkit/sample_service.hpp"
#include "restcheck/workflow/store.hpp"

using namespace restcheck;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(testkit::read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::validation, path + ": " + e.what());
  }
}

std::string now_utc() { return workflow::system_clock()(); }

int cmd_parse(const std::string& source, bool as_json) {
  const auto spec = spec::load_spec(source);
  if (as_json) {
    Json ops = Json::array();
    for (const auto& op : spec.operations) {
      Json codes = Json::array();
      for (const auto& c : spec::expected_status_codes(op).codes) codes.push_back(c);
      ops.push_back({{"id", op.id},
                     {"endpoint", op.key()},
                     {"operation_id", op.operation_id},
                     {"summary", op.summary},
                     {"status_codes", codes}});
    }
    Json out{{"title", spec.title},
             {"version", spec.version_tag},
             {"host_url", spec.host_url},
             {"operations", ops},
             {"warnings", spec.warnings}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << spec.title << " (" << spec.version_tag << ") " << spec.host_url << "\n";
  for (const auto& op : spec.operations) {
    std::cout << "  " << op.id << "  " << op.key();
    if (!op.summary.empty()) std::cout << "  " << op.summary;
    std::cout << "\n";
  }
  for (const auto& w : spec.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_render(const std::string& name, const std::vector<std::string>& binds, const std::string& bindings_file) {
  const auto* tmpl = llm::TemplateStore::shipped().find(name);
  if (tmpl == nullptr) throw Error(ErrorCode::not_found, "unknown template " + name);
  llm::Bindings bindings;
  if (!bindings_file.empty()) {
    for (const auto& [k, v] : read_json(bindings_file).items()) bindings[k] = v.get<std::string>();
  }
  for (const auto& b : binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::validation, "binding must be name=value: " + b);
    bindings[b.substr(0, eq)] = b.substr(eq + 1);
  }
  const auto prompt = llm::render_prompt(*tmpl, bindings);
  for (const auto& w : prompt.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "--- system\n" << prompt.system_message << "--- user\n" << prompt.user_message;
  return 0;
}

int cmd_prompts(bool dump) {
  if (dump) {
    std::cout << llm::TemplateStore::shipped_text();
    return 0;
  }
  for (const auto& t : llm::TemplateStore::shipped().templates()) {
    std::cout << t.name;
    for (const auto& v : t.variables) std::cout << " {{" << v << "}}";
    std::cout << "\n";
  }
  return 0;
}

std::vector<metrics::MetricRecord> bundle_metrics(const workflow::Project& p) {
  return metrics::evaluate_project(p, now_utc());
}

int cmd_metrics(const std::string& bundle_path, bool as_json) {
  const auto p = workflow::from_bundle(read_json(bundle_path));
  const auto records = bundle_metrics(p);
  if (as_json) {
    std::cout << metrics::to_json(std::span<const metrics::MetricRecord>(records)).dump(2) << "\n";
    return 0;
  }
  for (const auto& m : records) {
    std::cout << m.scope << "  " << m.metric;
    if (!m.variant.empty()) std::cout << "[" << m.variant << "]";
    if (const auto v = metrics::presented(m)) {
      std::cout << "  " << metrics::round_to(*v, 2);
    } else {
      std::cout << "  undefined (" << m.note << ")";
    }
    std::cout << "  " << m.numerator << "/" << m.denominator << "\n";
  }
  return 0;
}

int cmd_table(const std::vector<std::string>& bundles) {
  std::vector<metrics::TableRow> rows;
  for (const auto& path : bundles) {
    const auto p = workflow::from_bundle(read_json(path));
    const auto records = bundle_metrics(p);
    const auto api = p.spec.title.empty() ? p.id : p.spec.title;
    rows.push_back(metrics::table_row(api, records, p.id));
  }
  const auto columns = metrics::default_columns();
  std::cout << metrics::render_table(rows, columns);
  return 0;
}

int cmd_serve(const std::string& config_path, const std::string& routes, const std::string& host, int port) {
  const auto config = config_path.empty() ? service::ServiceConfig{}
                                          : service::ServiceConfig::from_json(read_json(config_path),
                                                                              testkit::runner_dir().string());
  std::shared_ptr<llm::ChatTransport> transport;
  if (routes.empty()) {
    transport = std::make_shared<llm::HttpChatTransport>();
  } else {
    transport = testkit::ScriptedResponder::from_file(routes);
  }
  service::Service svc(workflow::open_store(config.store), transport, config.llm, config.runner,
                       workflow::system_clock(), config.agent);
  service::HttpApi api(svc, config.workers);
  const int bound = api.start(host, port);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  wait_for_signal();
  api.stop();
  return 0;
}

int cmd_sample_service(const std::string& faults_path, const std::string& host, int port) {
  std::vector<testkit::Fault> faults;
  if (!faults_path.empty()) faults = testkit::parse_fault_plan(read_json(faults_path));
  testkit::SampleService sample(std::move(faults));
  sample.start(host, port);
  std::cout << "sample service on " << sample.base_url() << std::endl;
  wait_for_signal();
  sample.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"restcheck: LLM-assisted REST API test generation"};
  app.require_subcommand(1);

  std::string source;
  bool json_out = false;
  auto* parse = app.add_subcommand("parse", "List the operations of an OpenAPI/Swagger document");
  parse->add_option("source", source, "File path or http(s) url")->required();
  parse->add_flag("--json", json_out, "Machine-readable output");

  std::string tmpl_name, bindings_file;
  std::vector<std::string> binds;
  auto* render = app.add_subcommand("render", "Render a shipped prompt template");
  render->add_option("template", tmpl_name, "Template key, e.g. generate_test_scenario_prompt")->required();
  render->add_option("-b,--bind", binds, "name=value, repeatable");
  render->add_option("--bindings", bindings_file, "JSON object of bindings")->check(CLI::ExistingFile);

  bool dump = false;
  auto* prompts = app.add_subcommand("prompts", "List the shipped templates and their variables");
  prompts->add_flag("--dump", dump, "Print the template store verbatim");

  std::string bundle;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute every metric for an exported bundle");
  metrics_cmd->add_option("bundle", bundle, "Bundle JSON file")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_flag("--json", json_out, "Machine-readable output");

  std::vector<std::string> bundles;
  auto* table = app.add_subcommand("table", "Comparison table over several bundles");
  table->add_option("bundles", bundles, "Bundle JSON files")->required()->check(CLI::ExistingFile);

  std::string config_path, routes, host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("-c,--config", config_path, "Service config JSON")->check(CLI::ExistingFile);
  serve->add_option("--routes", routes, "Answer LLM calls from a scripted routes file")->check(CLI::ExistingFile);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("-p,--port", port, "Port, 0 picks a free one");

  std::string faults_path;
  int sample_port = 0;
  auto* sample = app.add_subcommand("sample-service", "Run the local items service");
  sample->add_option("--faults", faults_path, "Fault plan JSON")->check(CLI::ExistingFile);
  sample->add_option("--host", host, "Bind address");
  sample->add_option("-p,--port", sample_port, "Port, 0 picks a free one");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) return cmd_parse(source, json_out);
    if (*render) return cmd_render(tmpl_name, binds, bindings_file);
    if (*prompts) return cmd_prompts(dump);
    if (*metrics_cmd) return cmd_metrics(bundle, json_out);
    if (*table) return cmd_table(bundles);
    if (*serve) return cmd_serve(config_path, routes, host, port);
    if (*sample) return cmd_sample_service(faults_path, host, sample_port);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
