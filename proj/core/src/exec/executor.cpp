#include "restcheck/exec/executor.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "exec/process.hpp"
#include "net/http_client.hpp"

extern char** environ;

namespace restcheck::exec {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::runner_failure, "cannot write " + p.string());
}

std::string replace_all(std::string text, std::string_view from, const std::string& to) {
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string strip_base(std::string_view path, std::string_view base) {
  while (!base.empty() && base.back() == '/') base.remove_suffix(1);
  if (!base.empty() && path.starts_with(base) && (path.size() == base.size() || path[base.size()] == '/' ||
                                                 path[base.size()] == '?')) {
    path.remove_prefix(base.size());
  }
  std::string out(path.substr(0, path.find('?')));
  if (out.empty()) out = "/";
  return out;
}

std::string base_path_of(std::string_view host_url) {
  if (!net::is_http_url(host_url)) return {};
  return net::split_url(host_url).path;
}

bool declares(const spec::ApiOperation& op, int code) {
  auto text = std::to_string(code);
  if (op.responses.contains(text) || op.responses.contains("default")) return true;
  std::string range = text.substr(0, 1) + "XX";
  return op.responses.contains(range) || op.responses.contains(lower(range));
}

std::map<std::string, std::string> child_env(const RunnerConfig& config) {
  std::map<std::string, std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    std::string_view kv(*e);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key(kv.substr(0, eq));
    if (std::find(config.env_allow.begin(), config.env_allow.end(), key) != config.env_allow.end()) {
      env[key] = std::string(kv.substr(eq + 1));
    }
  }
  env["PYTHONDONTWRITEBYTECODE"] = "1";
  for (const auto& [k, v] : config.env) env[k] = v;
  return env;
}

std::chrono::milliseconds timeout_of(const RunnerConfig& c) {
  return std::chrono::milliseconds(static_cast<long long>(c.timeout_seconds * 1000.0));
}

}  // namespace

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::passed: return "passed";
    case Outcome::failed: return "failed";
    case Outcome::error: return "error";
  }
  return "error";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "passed") return Outcome::passed;
  if (text == "failed") return Outcome::failed;
  if (text == "error") return Outcome::error;
  throw Error(ErrorCode::runner_failure, "unknown outcome '" + std::string(text) + "'");
}

std::string_view to_string(BugCategory c) noexcept {
  switch (c) {
    case BugCategory::functional_error: return "functional-error";
    case BugCategory::spec_inconsistency: return "spec-inconsistency";
    case BugCategory::undefined_status_code: return "undefined-status-code";
  }
  return "functional-error";
}

BugCategory parse_bug_category(std::string_view text) {
  if (text == "functional-error") return BugCategory::functional_error;
  if (text == "spec-inconsistency") return BugCategory::spec_inconsistency;
  if (text == "undefined-status-code") return BugCategory::undefined_status_code;
  throw Error(ErrorCode::validation, "unknown bug category '" + std::string(text) + "'");
}

std::string_view to_string(SyntaxVerdict v) noexcept {
  switch (v) {
    case SyntaxVerdict::valid: return "valid";
    case SyntaxVerdict::invalid: return "invalid";
    case SyntaxVerdict::unknown: return "unknown";
  }
  return "unknown";
}

bool ExecutionResult::all_passed() const {
  return report_error.empty() && !timed_out && !cases.empty() &&
         std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.outcome == Outcome::passed; });
}

void RunnerConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_config, what); };
  if (syntax_check_command.find("{script}") == std::string::npos) fail("syntax-check-command lacks {script}");
  if (run_command.find("{script}") == std::string::npos) fail("run-command lacks {script}");
  if (run_command.find("{report}") == std::string::npos) fail("run-command lacks {report}");
  if (!(timeout_seconds > 0.0)) fail("runner timeout-seconds must be positive");
  if (work_root.empty()) fail("runner work-root is empty");
}

RunnerConfig RunnerConfig::pytest(const std::string& runner_dir, const std::string& work_root) {
  RunnerConfig c;
  c.run_command = "python3 " + shell_quote(runner_dir + "/run_pytest.py") + " {script} {report}";
  c.work_root = work_root;
  return c;
}

RunnerConfig RunnerConfig::from_json(const Json& j, const std::string& default_runner_dir) {
  std::string work_root = j.value("work-root", (fs::temp_directory_path() / "restcheck-runs").string());
  RunnerConfig c = pytest(j.value("runner-dir", default_runner_dir), work_root);
  try {
    if (j.contains("syntax-check-command")) c.syntax_check_command = j.at("syntax-check-command").get<std::string>();
    if (j.contains("run-command")) c.run_command = j.at("run-command").get<std::string>();
    if (j.contains("timeout-seconds")) c.timeout_seconds = j.at("timeout-seconds").get<double>();
    if (j.contains("env-allow")) c.env_allow = j.at("env-allow").get<std::vector<std::string>>();
    if (j.contains("env")) c.env = j.at("env").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("bad runner config: ") + e.what());
  }
  c.validate();
  return c;
}

Json RunnerConfig::to_json() const {
  return Json{{"syntax-check-command", syntax_check_command},
              {"run-command", run_command},
              {"work-root", work_root},
              {"timeout-seconds", timeout_seconds},
              {"env-allow", env_allow},
              {"env", env}};
}

std::vector<TestCaseResult> parse_runner_report(std::string_view text) {
  std::vector<TestCaseResult> cases;
  try {
    Json doc = Json::parse(text);
    if (!doc.is_array()) throw Error(ErrorCode::runner_failure, "runner report is not a JSON array");
    for (const auto& item : doc) {
      TestCaseResult c;
      c.name = item.at("name").get<std::string>();
      c.outcome = parse_outcome(item.at("outcome").get<std::string>());
      c.message = item.value("message", std::string());
      if (c.outcome == Outcome::failed && c.message.empty()) c.message = "assertion failed";
      if (auto it = item.find("responses"); it != item.end() && it->is_array()) {
        for (const auto& r : *it) {
          c.responses.push_back(CapturedResponse{r.at("method").get<std::string>(), r.at("path").get<std::string>(),
                                                 r.at("status").get<int>(), r.value("body_digest", std::string())});
        }
      }
      cases.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::runner_failure, std::string("malformed runner report: ") + e.what());
  }
  return cases;
}

namespace {

const spec::ApiOperation* match_op(std::span<const spec::ApiOperation> ops, std::string_view method,
                                   std::string_view path) {
  auto m = spec::parse_method(method);
  if (!m) return nullptr;
  const spec::ApiOperation* best = nullptr;
  long best_literals = -1;
  for (const auto& op : ops) {
    if (op.method != *m || !spec::path_matches(op.path, path)) continue;
    long literals = 0;
    bool templated = false;
    bool any = false;
    for (char c : op.path + "/") {
      if (c == '/') {
        if (any && !templated) ++literals;
        templated = any = false;
      } else {
        any = true;
        templated = templated || c == '{';
      }
    }
    if (literals > best_literals) {
      best = &op;
      best_literals = literals;
    }
  }
  return best;
}

}  // namespace

std::optional<std::string> match_operation(std::span<const spec::ApiOperation> ops, std::string_view method,
                                           std::string_view path) {
  const auto* op = match_op(ops, method, path);
  if (op == nullptr) return std::nullopt;
  return op->key();
}

std::map<std::string, std::set<int>> observed_codes(std::span<const TestCaseResult> cases,
                                                    std::span<const spec::ApiOperation> ops,
                                                    std::string_view base_path) {
  std::map<std::string, std::set<int>> out;
  for (const auto& c : cases) {
    for (const auto& r : c.responses) {
      if (auto key = match_operation(ops, r.method, strip_base(r.path, base_path))) out[*key].insert(r.status);
    }
  }
  return out;
}

BugTally tally_bugs(std::span<const TestCaseResult> cases, std::span<const spec::ApiOperation> ops,
                    std::string_view base_path) {
  static const char* kSchemaWords[] = {"schema", "field", "key", "property", "isinstance", " in "};
  BugTally tally;
  for (const auto& c : cases) {
    if (c.outcome != Outcome::failed) continue;
    BugItem item{c.name, BugCategory::functional_error, {}};
    for (const auto& r : c.responses) {
      const auto* op = match_op(ops, r.method, strip_base(r.path, base_path));
      if (op == nullptr) continue;
      if (!declares(*op, r.status)) {
        item.category = BugCategory::undefined_status_code;
        std::string declared;
        for (const auto& [code, _] : op->responses) declared += (declared.empty() ? "" : ", ") + code;
        item.evidence = op->key() + " returned " + std::to_string(r.status) + " (declared: " + declared + ")";
        break;
      }
    }
    if (item.category != BugCategory::undefined_status_code) {
      auto msg = lower(c.message);
      item.evidence = c.message.substr(0, c.message.find('\n'));
      if (msg.find("status_code") != std::string::npos) {
        item.category = BugCategory::functional_error;
      } else if (std::any_of(std::begin(kSchemaWords), std::end(kSchemaWords),
                             [&](const char* w) { return msg.find(w) != std::string::npos; })) {
        item.category = BugCategory::spec_inconsistency;
      }
    }
    switch (item.category) {
      case BugCategory::functional_error: ++tally.functional_error; break;
      case BugCategory::spec_inconsistency: ++tally.spec_inconsistency; break;
      case BugCategory::undefined_status_code: ++tally.undefined_status_code; break;
    }
    ++tally.total;
    tally.items.push_back(std::move(item));
  }
  return tally;
}

double correctness_score(const ExecutionResult& result) {
  if (result.cases.empty()) {
    throw Error(ErrorCode::undefined_metric, "correctness score is undefined without executed test cases");
  }
  auto passed = std::count_if(result.cases.begin(), result.cases.end(),
                              [](const auto& c) { return c.outcome == Outcome::passed; });
  return static_cast<double>(passed) / static_cast<double>(result.cases.size());
}

Executor::Executor(RunnerConfig config) : config_(std::move(config)) { config_.validate(); }

std::string Executor::fresh_dir() {
  std::error_code ec;
  fs::create_directories(config_.work_root, ec);
  std::string templ = (fs::path(config_.work_root) / "run-XXXXXX").string();
  if (::mkdtemp(templ.data()) == nullptr) {
    throw Error(ErrorCode::runner_failure, "cannot create run directory under " + config_.work_root);
  }
  ++runs_;
  return templ;
}

SyntaxCheck Executor::syntax_check(std::string_view script_text) {
  fs::path dir = fresh_dir();
  auto script = dir / "script.py";
  write_file(script, script_text);
  auto cmd = replace_all(config_.syntax_check_command, "{script}", shell_quote(script.string()));
  auto res = run_shell(cmd, dir.string(), child_env(config_), (dir / "stdout.txt").string(), timeout_of(config_));
  SyntaxCheck out;
  out.output = read_file(dir / "stdout.txt");
  if (res.timed_out) {
    out.verdict = SyntaxVerdict::unknown;
  } else if (res.exit_code == 127) {
    throw Error(ErrorCode::runner_config, "syntax check command not found", Json{{"output", out.output}});
  } else {
    out.verdict = res.exit_code == 0 ? SyntaxVerdict::valid : SyntaxVerdict::invalid;
  }
  return out;
}

ExecutionResult Executor::execute(std::string_view script_text, std::span<const spec::ApiOperation> ops,
                                  std::string_view host_url) {
  fs::path dir = fresh_dir();
  auto script = dir / "script.py";
  auto report = dir / "report.json";
  write_file(script, script_text);
  auto cmd = replace_all(config_.run_command, "{script}", shell_quote(script.string()));
  cmd = replace_all(cmd, "{report}", shell_quote(report.string()));
  auto env = child_env(config_);
  env["API_BASE_URL"] = std::string(host_url);

  ExecutionResult result;
  result.started_at = utc_timestamp();
  auto res = run_shell(cmd, dir.string(), env, (dir / "stdout.txt").string(), timeout_of(config_));
  result.finished_at = utc_timestamp();
  result.raw_output = read_file(dir / "stdout.txt");
  result.timed_out = res.timed_out;
  result.exit_code = res.exit_code;
  if (res.exit_code == 127) {
    throw Error(ErrorCode::runner_config, "run command not found", Json{{"output", result.raw_output}});
  }
  if (fs::exists(report)) {
    try {
      result.cases = parse_runner_report(read_file(report));
    } catch (const Error& e) {
      result.report_error = e.what();
    }
  } else {
    result.report_error = "runner produced no report";
  }
  if (result.timed_out) {
    for (auto& c : result.cases) {
      if (c.outcome == Outcome::passed || c.outcome == Outcome::failed) continue;
      if (c.message.empty()) c.message = "not finished before timeout";
    }
  }
  auto base = base_path_of(host_url);
  result.observed_status_codes = observed_codes(result.cases, ops, base);
  result.bugs = tally_bugs(result.cases, ops, base);
  return result;
}

Json to_json(const ExecutionResult& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json responses = Json::array();
    for (const auto& resp : c.responses) {
      responses.push_back(
          Json{{"method", resp.method}, {"path", resp.path}, {"status", resp.status}, {"body_digest", resp.body_digest}});
    }
    cases.push_back(Json{{"name", c.name}, {"outcome", to_string(c.outcome)}, {"message", c.message}, {"responses", responses}});
  }
  Json observed = Json::object();
  for (const auto& [k, codes] : r.observed_status_codes) observed[k] = codes;
  Json items = Json::array();
  for (const auto& b : r.bugs.items) {
    items.push_back(Json{{"case_name", b.case_name}, {"category", to_string(b.category)}, {"evidence", b.evidence}});
  }
  return Json{{"id", r.id},
              {"script_id", r.script_id},
              {"started_at", r.started_at},
              {"finished_at", r.finished_at},
              {"exit_code", r.exit_code ? Json(*r.exit_code) : Json(nullptr)},
              {"timed_out", r.timed_out},
              {"report_error", r.report_error},
              {"cases", cases},
              {"observed_status_codes", observed},
              {"bug_tally",
               Json{{"total", r.bugs.total},
                    {"by_category",
                     Json{{"functional-error", r.bugs.functional_error},
                          {"spec-inconsistency", r.bugs.spec_inconsistency},
                          {"undefined-status-code", r.bugs.undefined_status_code}}},
                    {"items", items}}},
              {"raw_output", r.raw_output}};
}

ExecutionResult execution_from_json(const Json& j) {
  ExecutionResult r;
  r.id = j.at("id").get<std::string>();
  r.script_id = j.at("script_id").get<std::string>();
  r.started_at = j.at("started_at").get<std::string>();
  r.finished_at = j.at("finished_at").get<std::string>();
  if (!j.at("exit_code").is_null()) r.exit_code = j.at("exit_code").get<int>();
  r.timed_out = j.at("timed_out").get<bool>();
  r.report_error = j.at("report_error").get<std::string>();
  r.cases = parse_runner_report(j.at("cases").dump());
  for (const auto& [k, codes] : j.at("observed_status_codes").items()) {
    r.observed_status_codes[k] = codes.get<std::set<int>>();
  }
  const auto& bt = j.at("bug_tally");
  r.bugs.total = bt.at("total").get<int>();
  r.bugs.functional_error = bt.at("by_category").at("functional-error").get<int>();
  r.bugs.spec_inconsistency = bt.at("by_category").at("spec-inconsistency").get<int>();
  r.bugs.undefined_status_code = bt.at("by_category").at("undefined-status-code").get<int>();
  for (const auto& item : bt.at("items")) {
    r.bugs.items.push_back(BugItem{item.at("case_name").get<std::string>(),
                                   parse_bug_category(item.at("category").get<std::string>()),
                                   item.at("evidence").get<std::string>()});
  }
  r.raw_output = j.at("raw_output").get<std::string>();
  return r;
}

std::string execution_summary_text(const ExecutionResult& r) {
  std::string out;
  if (r.timed_out) out += "runner timed out\n";
  if (!r.report_error.empty()) out += "runner error: " + r.report_error + "\n";
  for (const auto& c : r.cases) {
    out += c.name + ": " + std::string(to_string(c.outcome)) + "\n";
    if (!c.message.empty()) out += "  message: " + c.message.substr(0, c.message.find('\n')) + "\n";
    for (const auto& resp : c.responses) {
      out += "  response: " + resp.method + " " + resp.path + " -> " + std::to_string(resp.status) + "\n";
    }
  }
  if (!r.observed_status_codes.empty()) {
    out += "observed status codes:\n";
    for (const auto& [k, codes] : r.observed_status_codes) {
      out += "  " + k + ":";
      for (int code : codes) out += " " + std::to_string(code);
      out += "\n";
    }
  }
  return out;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  ::gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

}  // namespace restcheck::exec
