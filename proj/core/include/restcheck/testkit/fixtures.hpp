#pragma once

#include <filesystem>
#include <string>

namespace restcheck::testkit {

/// Fixture corpus root (source tree), overridable with RESTCHECK_FIXTURE_DIR.
///
///   specs/        frozen spec snapshots (petstore3, catfact, items, ...)
///   completions/  canned model outputs and routes.json for the responder
///   scripts/      pytest scripts for executor tests
///   hashes.json   pinned sha256 of every spec snapshot
std::filesystem::path fixture_dir();
std::filesystem::path spec_fixture(const std::string& name);  // "petstore3" -> specs/petstore3.json

/// Directory holding run_pytest.py, overridable with RESTCHECK_RUNNER_DIR.
std::filesystem::path runner_dir();

std::string read_file(const std::filesystem::path& path);

}  // namespace restcheck::testkit
