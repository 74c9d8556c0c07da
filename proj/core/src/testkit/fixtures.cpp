#include "restcheck/testkit/fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "restcheck/error.hpp"

namespace restcheck::testkit {

namespace {

std::filesystem::path from_env(const char* var, const char* fallback) {
  const char* v = std::getenv(var);
  return (v != nullptr && *v != '\0') ? std::filesystem::path(v) : std::filesystem::path(fallback);
}

}  // namespace

std::filesystem::path fixture_dir() { return from_env("RESTCHECK_FIXTURE_DIR", RESTCHECK_FIXTURE_DIR_DEFAULT); }

std::filesystem::path spec_fixture(const std::string& name) { return fixture_dir() / "specs" / (name + ".json"); }

std::filesystem::path runner_dir() { return from_env("RESTCHECK_RUNNER_DIR", RESTCHECK_RUNNER_DIR_DEFAULT); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace restcheck::testkit
