#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rtlagent/vlog/drivers.hpp"
#include "rtlagent/wave/table.hpp"

namespace rtlagent::astwt {

struct TraceRequest {
  std::set<std::string> mismatched_signals;
  int level = 1;
  std::uint64_t mismatch_time = 0;
  int cycles_before = 3;  // debug window default, agent-overridable
  int cycles_after = 2;
};

struct CodeRef {
  std::string signal;
  std::string text;  // statement source, verbatim slice
  int line = 1;
  int hop = 0;
};

struct TraceReport {
  std::vector<CodeRef> code_refs;
  wave::WaveTable table;
  std::string truncation_note;          // empty unless the budget bit
  std::vector<std::string> not_dumped;  // traced but absent from the dump
};

/// Budget on report columns: the report is model context, and wide fan-in
/// would flood it. Truncation keeps lowest hop first and is disclosed.
inline constexpr std::size_t kSignalBudget = 12;

/// Fuses backtrace(module, mismatched, level) with a waveform table
/// windowed around the mismatch time. `scope` (e.g. "tb.dut"), when
/// nonempty, anchors signal-name resolution inside the dump hierarchy
/// before suffix matching is tried.
TraceReport trace(const vlog::AstModule& module, const wave::WaveDb& db,
                  const TraceRequest& req, const std::string& clock,
                  const std::string& scope = "");

/// Plain-text rendering with `== CODE ==` and `== WAVEFORM ==` sections;
/// byte-identical for identical reports.
std::string render_report(const TraceReport& report);

}  // namespace rtlagent::astwt
