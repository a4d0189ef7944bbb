#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlagent/vlog/ast.hpp"

namespace rtlagent::vlog {

struct UnknownSignal : std::runtime_error {
  explicit UnknownSignal(const std::string& name)
      : std::runtime_error("unknown signal '" + name + "'"), signal(name)
  {
  }
  std::string signal;
};

struct DriverSite {
  SourceSpan span;
  AssignKind kind = AssignKind::Continuous;
};

/// The set of identifiers that feed one signal: everything read by the
/// statements assigning it, plus the control conditions those statements
/// sit under (if conditions, case subjects, event-control signals).
struct DriverSet {
  std::string target;
  std::set<std::string> drivers;
  std::vector<DriverSite> sites;
};

struct TraceEdge {
  std::string from;
  std::string to;
  DriverSite site;
};

struct TraceGraph {
  std::set<std::string> roots;
  std::vector<TraceEdge> edges;
  std::map<std::string, int> level_of;

  std::set<std::string> signals() const
  {
    std::set<std::string> out;
    for (const auto& [name, _] : level_of)
      out.insert(name);
    return out;
  }
};

DriverSet direct_drivers(const AstModule& module, std::string_view signal);

/// Breadth-first expansion of direct_drivers from `roots`, stopping after
/// `level` hops. Signals reached earlier are never re-expanded.
TraceGraph backtrace(const AstModule& module, const std::set<std::string>& roots, int level);

}  // namespace rtlagent::vlog
