#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>

namespace restcheck::exec {

struct ProcessResult {
  std::optional<int> exit_code;  // 128+signal for signalled children
  bool timed_out = false;
};

/// Runs `/bin/sh -c command` in `cwd` with exactly `env`, stdout and stderr
/// both going to `output_file`. The child gets its own process group, which
/// is killed as a whole on timeout.
ProcessResult run_shell(const std::string& command, const std::string& cwd,
                        const std::map<std::string, std::string>& env, const std::string& output_file,
                        std::chrono::milliseconds timeout);

/// POSIX single-quote quoting.
std::string shell_quote(const std::string& text);

}  // namespace restcheck::exec
