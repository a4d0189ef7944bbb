#pragma once

// Random waveform database generator shared by unit tests and the
// acceptance gate. Produces WaveDb values that satisfy the class
// invariants directly (strictly ascending change times, width-exact
// values).

#include <random>
#include <string>
#include <vector>

#include "rtlagent/wave/vcd.hpp"

namespace wave_random {

inline rtlagent::wave::WaveDb make_db(std::mt19937& rng)
{
  using rtlagent::wave::Change;
  using rtlagent::wave::WaveDb;

  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  static const char* scopes[] = {"tb", "tb.dut", "tb.ref", "tb.dut.u0"};
  WaveDb db;
  db.timescale_mag = pick(0, 1) ? 1 : 10;
  db.timescale_unit = pick(0, 1) ? "ns" : "ps";

  const int nsignals = pick(1, 6);
  for (int i = 0; i < nsignals; ++i) {
    rtlagent::wave::VcdSignal sig;
    sig.name = std::string(scopes[pick(0, 3)]) + ".sig" + std::to_string(i);
    sig.width = pick(1, 8);
    sig.id = std::string(1, static_cast<char>('!' + i));
    db.signals.push_back(sig);

    std::vector<Change> changes;
    std::uint64_t t = 0;
    const int nch = pick(0, 12);
    for (int c = 0; c < nch; ++c) {
      t += static_cast<std::uint64_t>(pick(c == 0 ? 0 : 1, 9));
      std::string value;
      for (int b = 0; b < sig.width; ++b)
        value += "01xz"[pick(0, 9) < 8 ? pick(0, 1) : pick(2, 3)];
      if (!changes.empty() && changes.back().time == t)
        changes.back().value = value;
      else
        changes.push_back({t, value});
    }
    db.changes[sig.name] = std::move(changes);
  }
  db.begin_time = 0;
  db.end_time = 0;
  for (const auto& [name, list] : db.changes)
    if (!list.empty())
      db.end_time = std::max(db.end_time, list.back().time);
  db.end_time += static_cast<std::uint64_t>(pick(0, 5));
  return db;
}

/// Independent last-value oracle: reverse linear scan.
inline std::string scan_value(const rtlagent::wave::WaveDb& db, const std::string& name,
                              std::uint64_t t)
{
  int width = 1;
  for (const auto& s : db.signals)
    if (s.name == name)
      width = s.width;
  const auto it = db.changes.find(name);
  if (it != db.changes.end()) {
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
      if (rit->time <= t)
        return rit->value;
  }
  return std::string(static_cast<std::size_t>(width), 'x');
}

}  // namespace wave_random
