#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlagent::wave {

struct VcdFormatError : std::runtime_error {
  VcdFormatError(std::size_t offset, const std::string& what)
      : std::runtime_error("VCD error at byte " + std::to_string(offset) + ": " + what),
        offset(offset)
  {
  }
  std::size_t offset;
};

struct DuplicateIdCode : std::runtime_error {
  explicit DuplicateIdCode(const std::string& detail)
      : std::runtime_error("duplicate VCD declaration: " + detail)
  {
  }
};

/// One recorded value change. `value` is a 4-state string over {0,1,x,z},
/// always exactly the signal's declared width.
struct Change {
  std::uint64_t time = 0;
  std::string value;

  bool operator==(const Change&) const = default;
};

struct VcdSignal {
  std::string name;  // full hierarchical name, dot-separated
  int width = 1;
  std::string id;  // id code from the source dump
};

struct WaveDb {
  int timescale_mag = 1;
  std::string timescale_unit = "ns";
  std::vector<VcdSignal> signals;                      // declaration order
  std::map<std::string, std::vector<Change>> changes;  // keyed by full name
  std::uint64_t begin_time = 0;
  std::uint64_t end_time = 0;

  const VcdSignal* find(const std::string& full_name) const
  {
    for (const auto& s : signals)
      if (s.name == full_name)
        return &s;
    return nullptr;
  }

  /// Last recorded value at or before `t`; all-x before the first change.
  std::string value_at(const std::string& full_name, std::uint64_t t) const;
};

WaveDb parse_vcd(std::string_view data);

/// Inverse of parse_vcd up to id-code renaming: re-parsing the output
/// yields the same names, widths, changes, and bounds.
std::string to_vcd(const WaveDb& db);

}  // namespace rtlagent::wave
