#include "restcheck/agents/reports.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace restcheck::agents {

namespace {

constexpr double kAuditTolerance = 0.01;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Json parse_report_json(std::string_view completion) {
  auto body = strip_code_fences(completion);
  try {
    Json j = Json::parse(trim(body));
    if (!j.is_object()) {
      throw Error(ErrorCode::report_parse, "checker output is not a JSON object", Json{{"raw", completion}});
    }
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::report_parse, std::string("checker output is not JSON: ") + e.what(),
                Json{{"raw", completion}});
  }
}

[[noreturn]] void shape_error(const std::string& what, std::string_view raw) {
  throw Error(ErrorCode::report_shape, "checker report " + what, Json{{"raw", raw}});
}

const Json& require(const Json& obj, const char* key, std::string_view raw, const std::string& where = {}) {
  auto it = obj.find(key);
  if (it == obj.end()) shape_error("missing key \"" + std::string(key) + "\"" + where, raw);
  return *it;
}

// Accepts 50, 50.0, "50", "50%".
std::optional<double> as_percent(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s(trim(v.get<std::string>()));
    if (!s.empty() && s.back() == '%') s.pop_back();
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return d;
  }
  return std::nullopt;
}

int as_count(const Json& v, const std::string& what, std::string_view raw) {
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<int>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d >= 0 && std::floor(d) == d) return static_cast<int>(d);
  }
  shape_error(what + " must be a non-negative integer", raw);
}

std::string code_text(const Json& v) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_string()) return std::string(trim(v.get<std::string>()));
  return v.dump();
}

std::vector<std::string> code_list(const Json& v, const std::string& what, std::string_view raw) {
  if (!v.is_array()) shape_error(what + " must be a list", raw);
  std::vector<std::string> out;
  for (const auto& item : v) {
    auto code = code_text(item);
    if (std::find(out.begin(), out.end(), code) == out.end()) out.push_back(code);
  }
  return out;
}

void audit(std::optional<double> stated, std::optional<double> recomputed, const std::string& what,
           std::vector<std::string>& warnings) {
  if (!stated) return;
  if (!recomputed) {
    warnings.push_back(what + ": model stated " + std::to_string(*stated) + " but the value is undefined");
    return;
  }
  if (std::fabs(*stated - *recomputed) > kAuditTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: model stated %.2f, recomputed %.2f", what.c_str(), *stated, *recomputed);
    warnings.emplace_back(buf);
  }
}

Json opt(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_from(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

double round2(double value) { return std::round(value * 100.0 + (value >= 0 ? 1e-9 : -1e-9)) / 100.0; }

std::string_view to_string(StatusCodeMode mode) noexcept {
  return mode == StatusCodeMode::static_script ? "static" : "dynamic";
}

bool DataTypeReport::all_matched() const {
  return std::all_of(per_endpoint.begin(), per_endpoint.end(),
                     [](const auto& kv) { return kv.second.matched == kv.second.total && kv.second.mismatches.empty(); });
}

std::string normalize_endpoint(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '`' && text.back() == '`') text = trim(text.substr(1, text.size() - 2));
  auto space = text.find_first_of(" \t");
  if (space == std::string_view::npos) return std::string(text);
  std::string method(text.substr(0, space));
  std::transform(method.begin(), method.end(), method.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return method + " " + std::string(trim(text.substr(space)));
}

std::string strip_code_fences(std::string_view text) {
  auto body = text;
  auto lead = trim(body);
  if (lead.starts_with("```")) {
    auto nl = lead.find('\n');
    body = nl == std::string_view::npos ? std::string_view{} : lead.substr(nl + 1);
    auto tail = body;
    while (!tail.empty() && std::isspace(static_cast<unsigned char>(tail.back()))) tail.remove_suffix(1);
    if (tail.ends_with("```")) {
      tail.remove_suffix(3);
      body = tail;
    }
    return std::string(body);
  }
  auto tail = text;
  while (!tail.empty() && std::isspace(static_cast<unsigned char>(tail.back()))) tail.remove_suffix(1);
  if (tail.ends_with("\n```")) {
    tail.remove_suffix(3);
    return std::string(tail);
  }
  return std::string(text);
}

DataTypeReport parse_data_type_report(std::string_view completion) {
  Json j = parse_report_json(completion);
  DataTypeReport r;
  r.stated_coverage = as_percent(require(j, "coverage", completion));
  const Json& detail = require(j, "detail", completion);
  if (!detail.is_object()) shape_error("\"detail\" must be an object", completion);
  long long matched_sum = 0;
  long long total_sum = 0;
  for (const auto& [endpoint, node] : detail.items()) {
    const std::string where = " for " + endpoint;
    if (!node.is_object()) shape_error("entry" + where + " must be an object", completion);
    EndpointTypeCoverage ep;
    ep.matched = as_count(require(node, "matched", completion, where), "\"matched\"" + where, completion);
    ep.total = as_count(require(node, "total", completion, where), "\"total\"" + where, completion);
    if (ep.matched > ep.total) shape_error("\"matched\" exceeds \"total\"" + where, completion);
    if (auto it = node.find("coverage_percent"); it != node.end()) ep.stated_percent = as_percent(*it);
    if (auto it = node.find("mismatches"); it != node.end()) {
      if (!it->is_array()) shape_error("\"mismatches\"" + where + " must be a list", completion);
      for (const auto& m : *it) ep.mismatches.push_back(m.is_string() ? m.get<std::string>() : m.dump());
    }
    ep.coverage_percent = ep.total == 0 ? 100.0 : round2(100.0 * ep.matched / ep.total);
    auto key = normalize_endpoint(endpoint);
    audit(ep.stated_percent, ep.coverage_percent, key, r.warnings);
    matched_sum += ep.matched;
    total_sum += ep.total;
    r.per_endpoint[key] = std::move(ep);
  }
  r.coverage_percent = total_sum == 0 ? 100.0 : round2(100.0 * static_cast<double>(matched_sum) / total_sum);
  audit(r.stated_coverage, r.coverage_percent, "coverage", r.warnings);
  return r;
}

MethodCoverageReport parse_method_coverage_report(std::string_view completion) {
  Json j = parse_report_json(completion);
  MethodCoverageReport r;
  r.stated_coverage = as_percent(require(j, "coverage", completion));
  const Json& expected = require(j, "expected", completion);
  const Json& used = require(j, "used_in_script", completion);
  if (!expected.is_array() || !used.is_array()) shape_error("\"expected\"/\"used_in_script\" must be lists", completion);
  for (const auto& e : expected) {
    auto key = normalize_endpoint(code_text(e));
    if (std::find(r.expected.begin(), r.expected.end(), key) == r.expected.end()) r.expected.push_back(key);
  }
  for (const auto& u : used) {
    auto key = normalize_endpoint(code_text(u));
    if (std::find(r.expected.begin(), r.expected.end(), key) == r.expected.end()) {
      r.warnings.push_back("used_in_script entry '" + key + "' is not expected; dropped");
      continue;
    }
    if (std::find(r.used_in_script.begin(), r.used_in_script.end(), key) == r.used_in_script.end()) {
      r.used_in_script.push_back(key);
    }
  }
  if (!r.expected.empty()) {
    r.coverage_percent = round2(100.0 * static_cast<double>(r.used_in_script.size()) / r.expected.size());
  } else {
    r.warnings.push_back("no expected operations; coverage undefined");
  }
  audit(r.stated_coverage, r.coverage_percent, "coverage", r.warnings);
  return r;
}

StatusCodeReport parse_status_code_report(std::string_view completion, StatusCodeMode mode) {
  Json j = parse_report_json(completion);
  StatusCodeReport r;
  r.mode = mode;
  r.stated_coverage = as_percent(require(j, "coverage", completion));
  const Json& detail = require(j, "detail", completion);
  if (!detail.is_object()) shape_error("\"detail\" must be an object", completion);
  const char* observed_key = mode == StatusCodeMode::static_script ? "used_in_script" : "covered_after_execution";
  std::size_t expected_sum = 0;
  std::size_t observed_sum = 0;
  for (const auto& [endpoint, node] : detail.items()) {
    const std::string where = " for " + endpoint;
    if (!node.is_object()) shape_error("entry" + where + " must be an object", completion);
    EndpointCodes ep;
    ep.expected = code_list(require(node, "expected", completion, where), "\"expected\"" + where, completion);
    auto observed = code_list(require(node, observed_key, completion, where),
                              "\"" + std::string(observed_key) + "\"" + where, completion);
    auto key = normalize_endpoint(endpoint);
    for (auto& code : observed) {
      if (std::find(ep.expected.begin(), ep.expected.end(), code) == ep.expected.end()) {
        r.warnings.push_back(key + ": code " + code + " is not expected; ignored");
      } else {
        ep.observed.push_back(std::move(code));
      }
    }
    if (auto it = node.find("coverage_percent"); it != node.end()) ep.stated_percent = as_percent(*it);
    if (ep.stated_percent && !ep.expected.empty()) {
      audit(ep.stated_percent, round2(100.0 * ep.observed.size() / ep.expected.size()), key, r.warnings);
    }
    expected_sum += ep.expected.size();
    observed_sum += ep.observed.size();
    r.per_endpoint[key] = std::move(ep);
  }
  if (expected_sum > 0) {
    r.coverage_percent = round2(100.0 * static_cast<double>(observed_sum) / static_cast<double>(expected_sum));
  } else {
    r.warnings.push_back("no expected status codes; coverage undefined");
  }
  audit(r.stated_coverage, r.coverage_percent, "coverage", r.warnings);
  return r;
}

Json to_json(const DataTypeReport& r) {
  Json detail = Json::object();
  for (const auto& [k, ep] : r.per_endpoint) {
    detail[k] = Json{{"matched", ep.matched},
                     {"total", ep.total},
                     {"coverage_percent", ep.coverage_percent},
                     {"stated_percent", opt(ep.stated_percent)},
                     {"mismatches", ep.mismatches}};
  }
  return Json{{"coverage", r.coverage_percent},
              {"stated_coverage", opt(r.stated_coverage)},
              {"detail", detail},
              {"warnings", r.warnings}};
}

Json to_json(const MethodCoverageReport& r) {
  return Json{{"coverage", opt(r.coverage_percent)},
              {"stated_coverage", opt(r.stated_coverage)},
              {"expected", r.expected},
              {"used_in_script", r.used_in_script},
              {"warnings", r.warnings}};
}

Json to_json(const StatusCodeReport& r) {
  const char* observed_key = r.mode == StatusCodeMode::static_script ? "used_in_script" : "covered_after_execution";
  Json detail = Json::object();
  for (const auto& [k, ep] : r.per_endpoint) {
    detail[k] = Json{{"expected", ep.expected}, {observed_key, ep.observed}, {"stated_percent", opt(ep.stated_percent)}};
  }
  return Json{{"mode", to_string(r.mode)},
              {"coverage", opt(r.coverage_percent)},
              {"stated_coverage", opt(r.stated_coverage)},
              {"detail", detail},
              {"warnings", r.warnings}};
}

DataTypeReport data_type_report_from_json(const Json& j) {
  DataTypeReport r;
  r.coverage_percent = j.at("coverage").get<double>();
  r.stated_coverage = opt_from(j, "stated_coverage");
  for (const auto& [k, ep] : j.at("detail").items()) {
    EndpointTypeCoverage e;
    e.matched = ep.at("matched").get<int>();
    e.total = ep.at("total").get<int>();
    e.coverage_percent = ep.at("coverage_percent").get<double>();
    e.stated_percent = opt_from(ep, "stated_percent");
    e.mismatches = ep.at("mismatches").get<std::vector<std::string>>();
    r.per_endpoint[k] = std::move(e);
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

MethodCoverageReport method_coverage_report_from_json(const Json& j) {
  MethodCoverageReport r;
  r.coverage_percent = opt_from(j, "coverage");
  r.stated_coverage = opt_from(j, "stated_coverage");
  r.expected = j.at("expected").get<std::vector<std::string>>();
  r.used_in_script = j.at("used_in_script").get<std::vector<std::string>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

StatusCodeReport status_code_report_from_json(const Json& j) {
  StatusCodeReport r;
  r.mode = j.at("mode").get<std::string>() == "static" ? StatusCodeMode::static_script
                                                       : StatusCodeMode::dynamic_execution;
  const char* observed_key = r.mode == StatusCodeMode::static_script ? "used_in_script" : "covered_after_execution";
  r.coverage_percent = opt_from(j, "coverage");
  r.stated_coverage = opt_from(j, "stated_coverage");
  for (const auto& [k, ep] : j.at("detail").items()) {
    EndpointCodes e;
    e.expected = ep.at("expected").get<std::vector<std::string>>();
    e.observed = ep.at(observed_key).get<std::vector<std::string>>();
    e.stated_percent = opt_from(ep, "stated_percent");
    r.per_endpoint[k] = std::move(e);
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace restcheck::agents
