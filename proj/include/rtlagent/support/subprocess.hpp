#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlagent::support {

/// Thrown when a child process cannot be started at all (missing binary,
/// bad working directory). Distinct from the child exiting nonzero.
struct SpawnError : std::runtime_error {
  explicit SpawnError(const std::string& what) : std::runtime_error(what) {}
};

struct RunResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs argv[0] with the given arguments in `cwd`, capturing stdout/stderr.
/// On timeout the child is killed and `timed_out` is set; partial output is
/// retained. The binary is resolved through PATH.
RunResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                      std::chrono::milliseconds timeout);

/// True when `binary` resolves to an executable through PATH (or is an
/// absolute path to one).
bool binary_on_path(const std::string& binary);

}  // namespace rtlagent::support
