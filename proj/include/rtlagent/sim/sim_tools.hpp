#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlagent/wave/vcd.hpp"

namespace rtlagent::sim {

/// Missing simulator binary. Fatal for the harness, never surfaced as an
/// agent observation.
struct ToolUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WorkdirError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulatorConfig {
  std::string compiler = "iverilog";
  std::string runner = "vvp";
  std::vector<std::string> extra_flags;
  int timeout_seconds = 30;
};

struct CompileDiag {
  int line = 0;
  std::string severity;  // "error" or "warning"
  std::string message;
};

struct CompileReport {
  bool ok = false;
  std::vector<CompileDiag> diagnostics;
  std::string raw_output;
};

/// Regex patterns (ECMAScript) over testbench stdout. `count_pattern`
/// captures (mismatches, samples); `time_pattern` captures the first
/// mismatch time. Defaults follow the common self-checking phrasing.
struct MismatchRules {
  std::string count_pattern = R"(Mismatches:\s*(\d+)\s+in\s+(\d+)\s+samples)";
  std::string time_pattern = R"(First mismatch at time\s*(\d+))";
};

struct SimReport {
  bool compiled = false;
  bool timed_out = false;
  std::optional<long long> mismatch_count;  // unset = unknown
  std::optional<long long> total_samples;
  std::optional<std::uint64_t> first_mismatch_time;
  std::optional<std::string> vcd_path;
  std::string raw_stdout;
  std::vector<CompileDiag> diagnostics;  // forwarded when compiled=false

  bool passed() const { return compiled && mismatch_count && *mismatch_count == 0; }
};

/// Compiles `dut_source` standalone in `workdir` (created if missing) and
/// parses compiler diagnostics. Workdir file: dut.v.
CompileReport check_syntax(const std::string& dut_source, const std::string& workdir,
                           const SimulatorConfig& cfg = {});

/// Compiles DUT + testbench, runs the simulation, and extracts mismatch
/// statistics from stdout per `rules`. Workdir files: dut.v, tb.v,
/// sim.out, stdout.log, and wave.vcd when the testbench dumps one. When
/// stdout lacks a first-mismatch time but the dump pairs `<x>_ref` with
/// `<x>_dut` signals, the time is recovered from the waveform.
SimReport simulate(const std::string& dut_source, const std::string& testbench_source,
                   const std::string& workdir, const MismatchRules& rules = {},
                   const SimulatorConfig& cfg = {});

struct RefDutDivergence {
  std::optional<std::uint64_t> first_time;
  std::vector<std::string> signals;  // base names (suffix stripped) differing at first_time
};

/// Compares every `<x>_ref` / `<x>_dut` pair in the dump; the first change
/// time where a pair with a fully-defined reference value differs.
RefDutDivergence ref_dut_divergence(const wave::WaveDb& db);

}  // namespace rtlagent::sim
