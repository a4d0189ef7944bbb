#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlagent/wave/vcd.hpp"

namespace rtlagent::wave {

struct UnknownSignal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoEdges : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WaveRow {
  std::uint64_t time = 0;
  std::vector<std::string> values;  // aligned with WaveTable::columns
};

struct WaveTable {
  std::vector<std::string> columns;  // names as requested by the caller
  std::vector<WaveRow> rows;
  std::uint64_t t_start = 0;
  std::uint64_t t_end = 0;
};

/// Resolves a possibly-unqualified name against the dump hierarchy: exact
/// full-name match first, then a unique suffix match on ".name". Zero or
/// multiple candidates raise UnknownSignal naming the near-matches.
std::string resolve_name(const WaveDb& db, const std::string& name);

/// One row per distinct change time of any requested signal within
/// (t_start, t_end], preceded by a row at t_start holding the values in
/// effect entering the window.
WaveTable tabulate(const WaveDb& db, const std::vector<std::string>& names,
                   std::uint64_t t_start, std::uint64_t t_end);

/// Window spanning `cycles_before` rising clock edges before the edge
/// enclosing `center` through `cycles_after` edges after it, clamped to
/// the dump bounds.
std::pair<std::uint64_t, std::uint64_t> window_around(const WaveDb& db, std::uint64_t center,
                                                      int cycles_before, int cycles_after,
                                                      const std::string& clock);

/// Fixed-width plain-text grid: header row with `time` first, cells
/// right-aligned, two spaces between columns, one trailing newline per row.
std::string render_table(const WaveTable& table);

}  // namespace rtlagent::wave
