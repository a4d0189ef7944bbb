#include "rtlagent/astwt/trace.hpp"

#include <algorithm>
#include <sstream>

namespace rtlagent::astwt {

namespace {

// Resolution order: scoped name, then bare suffix match. Returns empty if
// the dump has no trace of the signal under either rule.
std::string resolve_in_dump(const wave::WaveDb& db, const std::string& scope,
                            const std::string& name)
{
  if (!scope.empty()) {
    try {
      return wave::resolve_name(db, scope + "." + name);
    } catch (const wave::UnknownSignal&) {
    }
  }
  try {
    return wave::resolve_name(db, name);
  } catch (const wave::UnknownSignal&) {
  }
  return {};
}

std::string collapse_ws(std::string_view text)
{
  std::string out;
  bool in_ws = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in_ws = !out.empty();
      continue;
    }
    if (in_ws)
      out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

}  // namespace

TraceReport trace(const vlog::AstModule& module, const wave::WaveDb& db,
                  const TraceRequest& req, const std::string& clock,
                  const std::string& scope)
{
  const auto graph = vlog::backtrace(module, req.mismatched_signals, req.level);

  // Budget order: hop-major, name within a hop. Because hops fill in
  // order, truncating the tail can never orphan a kept signal's parent.
  std::vector<std::pair<int, std::string>> ordered;
  for (const auto& [name, hop] : graph.level_of)
    ordered.push_back({hop, name});
  std::sort(ordered.begin(), ordered.end());

  TraceReport report;
  std::vector<std::string> selected;
  for (const auto& [hop, name] : ordered) {
    if (selected.size() >= kSignalBudget)
      break;
    selected.push_back(name);
  }
  if (selected.size() < ordered.size()) {
    report.truncation_note = "signal set truncated to " + std::to_string(selected.size()) +
                             " of " + std::to_string(ordered.size()) +
                             " traced signals (lowest hops kept); raise the level or trace a "
                             "narrower signal to see more";
  }

  for (const auto& name : selected) {
    for (const auto& site : vlog::direct_drivers(module, name).sites) {
      CodeRef ref;
      ref.signal = name;
      ref.text = std::string(module.slice(site.span));
      ref.line = site.span.line;
      ref.hop = graph.level_of.at(name);
      report.code_refs.push_back(std::move(ref));
    }
  }
  std::stable_sort(report.code_refs.begin(), report.code_refs.end(),
                   [](const CodeRef& a, const CodeRef& b) {
                     return std::tie(a.hop, a.line, a.signal) < std::tie(b.hop, b.line, b.signal);
                   });

  std::vector<std::string> dumped;   // module-level names with dump entries
  std::vector<std::string> resolved; // their full hierarchical names
  for (const auto& name : selected) {
    auto full = resolve_in_dump(db, scope, name);
    if (full.empty()) {
      report.not_dumped.push_back(name);
    } else {
      dumped.push_back(name);
      resolved.push_back(full);
    }
  }

  const auto clock_full = resolve_in_dump(db, scope, clock);
  if (clock_full.empty())
    throw wave::UnknownSignal("clock '" + clock + "' not found in the dump");
  const auto [t0, t1] =
      wave::window_around(db, req.mismatch_time, req.cycles_before, req.cycles_after, clock_full);
  report.table = wave::tabulate(db, resolved, t0, t1);
  report.table.columns = dumped;  // display module-level names
  return report;
}

std::string render_report(const TraceReport& report)
{
  std::ostringstream os;
  os << "== CODE ==\n";
  for (const auto& ref : report.code_refs)
    os << "[hop " << ref.hop << "] " << ref.signal << ", line " << ref.line << ": "
       << collapse_ws(ref.text) << "\n";
  if (!report.truncation_note.empty())
    os << "note: " << report.truncation_note << "\n";
  os << "== WAVEFORM ==\n";
  os << "window [" << report.table.t_start << ", " << report.table.t_end << "]\n";
  os << wave::render_table(report.table);
  if (!report.not_dumped.empty()) {
    os << "not dumped:";
    for (const auto& name : report.not_dumped)
      os << " " << name;
    os << "\n";
  }
  return os.str();
}

}  // namespace rtlagent::astwt
