#include "rtlagent/wave/table.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace rtlagent::wave {

std::string resolve_name(const WaveDb& db, const std::string& name)
{
  if (db.find(name))
    return name;
  std::vector<std::string> matches;
  for (const auto& sig : db.signals) {
    if (sig.name.size() > name.size() + 1 && sig.name.compare(sig.name.size() - name.size(), name.size(), name) == 0 &&
        sig.name[sig.name.size() - name.size() - 1] == '.')
      matches.push_back(sig.name);
  }
  if (matches.size() == 1)
    return matches[0];
  if (matches.size() > 1) {
    std::string msg = "ambiguous signal '" + name + "': candidates";
    for (const auto& m : matches)
      msg += " " + m;
    throw UnknownSignal(msg);
  }
  std::string msg = "unknown signal '" + name + "'";
  std::vector<std::string> near;
  for (const auto& sig : db.signals)
    if (sig.name.find(name) != std::string::npos)
      near.push_back(sig.name);
  if (!near.empty()) {
    msg += "; near matches:";
    for (std::size_t i = 0; i < near.size() && i < 5; ++i)
      msg += " " + near[i];
  }
  throw UnknownSignal(msg);
}

WaveTable tabulate(const WaveDb& db, const std::vector<std::string>& names,
                   std::uint64_t t_start, std::uint64_t t_end)
{
  std::vector<std::string> resolved;
  for (const auto& n : names)
    resolved.push_back(resolve_name(db, n));

  std::set<std::uint64_t> times;
  for (const auto& full : resolved) {
    const auto it = db.changes.find(full);
    if (it == db.changes.end())
      continue;
    for (const auto& ch : it->second)
      if (ch.time > t_start && ch.time <= t_end)
        times.insert(ch.time);
  }

  WaveTable table;
  table.columns = names;
  table.t_start = t_start;
  table.t_end = t_end;

  auto emit_row = [&](std::uint64_t t) {
    WaveRow row;
    row.time = t;
    for (const auto& full : resolved)
      row.values.push_back(db.value_at(full, t));
    table.rows.push_back(std::move(row));
  };

  emit_row(t_start);
  for (const auto t : times)
    emit_row(t);
  return table;
}

std::pair<std::uint64_t, std::uint64_t> window_around(const WaveDb& db, std::uint64_t center,
                                                      int cycles_before, int cycles_after,
                                                      const std::string& clock)
{
  const auto full = resolve_name(db, clock);
  const auto cit = db.changes.find(full);
  const std::vector<Change> no_changes;
  const auto& changes = cit == db.changes.end() ? no_changes : cit->second;
  std::vector<std::uint64_t> edges;
  std::string prev;
  for (const auto& ch : changes) {
    if (ch.value == "1" && prev != "1")
      edges.push_back(ch.time);
    prev = ch.value;
  }
  if (edges.empty())
    throw NoEdges("clock '" + clock + "' has no rising edge");

  // index of the last edge at or before center; the first edge if center
  // precedes them all
  std::size_t i = 0;
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (edges[k] <= center)
      i = k;

  const long long lo = static_cast<long long>(i) - cycles_before;
  const long long hi = static_cast<long long>(i) + cycles_after;
  const std::uint64_t t_start =
      lo < 0 ? db.begin_time : edges[static_cast<std::size_t>(lo)];
  const std::uint64_t t_end = hi >= static_cast<long long>(edges.size())
                                  ? db.end_time
                                  : edges[static_cast<std::size_t>(hi)];
  return {t_start, t_end};
}

std::string render_table(const WaveTable& table)
{
  std::vector<std::string> headers = {"time"};
  headers.insert(headers.end(), table.columns.begin(), table.columns.end());

  std::vector<std::size_t> widths;
  for (const auto& h : headers)
    widths.push_back(h.size());
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : table.rows) {
    std::vector<std::string> line = {std::to_string(row.time)};
    line.insert(line.end(), row.values.begin(), row.values.end());
    for (std::size_t i = 0; i < line.size(); ++i)
      widths[i] = std::max(widths[i], line[i].size());
    cells.push_back(std::move(line));
  }

  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i)
        os << "  ";
      os << std::string(widths[i] - line[i].size(), ' ') << line[i];
    }
    os << "\n";
  };
  emit(headers);
  for (const auto& line : cells)
    emit(line);
  return os.str();
}

}  // namespace rtlagent::wave
