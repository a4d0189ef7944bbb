#include "rtlagent/vlog/drivers.hpp"

#include <deque>
#include <limits>

namespace rtlagent::vlog {

namespace {

void collect_expr_idents(const ExprPtr& e, std::set<std::string>& out)
{
  if (!e)
    return;
  if (e->kind == Expr::Kind::Identifier)
    out.insert(e->text);
  for (const auto& op : e->operands)
    collect_expr_idents(op, out);
}

/// Names assigned by an lvalue. Select indices on the left-hand side are
/// structural addressing, not data flow, so they are not collected here.
void collect_lvalue_targets(const ExprPtr& lhs, std::set<std::string>& out)
{
  if (!lhs)
    return;
  switch (lhs->kind) {
    case Expr::Kind::Identifier:
      out.insert(lhs->text);
      return;
    case Expr::Kind::BitSelect:
    case Expr::Kind::PartSelect:
      collect_lvalue_targets(lhs->operands.at(0), out);
      return;
    case Expr::Kind::Concat:
      for (const auto& op : lhs->operands)
        collect_lvalue_targets(op, out);
      return;
    default:
      return;
  }
}

struct SiteInfo {
  DriverSite site;
  std::set<std::string> drivers;
};

/// Walks a statement tree accumulating assignment sites for `signal`.
/// `enclosing` carries identifiers from every control construct on the
/// path: event-control signals, if conditions, and case subjects.
void walk_stmt(const StmtPtr& stmt, const std::string& signal,
               std::set<std::string> enclosing, std::vector<SiteInfo>& out)
{
  if (!stmt)
    return;
  switch (stmt->kind) {
    case Stmt::Kind::Assign: {
      std::set<std::string> targets;
      collect_lvalue_targets(stmt->lhs, targets);
      if (!targets.count(signal))
        return;
      SiteInfo info;
      info.site = {stmt->span, stmt->assign_kind};
      collect_expr_idents(stmt->rhs, info.drivers);
      info.drivers.insert(enclosing.begin(), enclosing.end());
      out.push_back(std::move(info));
      return;
    }
    case Stmt::Kind::If: {
      auto inner = enclosing;
      collect_expr_idents(stmt->condition, inner);
      walk_stmt(stmt->then_branch, signal, inner, out);
      walk_stmt(stmt->else_branch, signal, inner, out);
      return;
    }
    case Stmt::Kind::Case: {
      auto inner = enclosing;
      collect_expr_idents(stmt->subject, inner);
      for (const auto& arm : stmt->arms)
        walk_stmt(arm.body, signal, inner, out);
      return;
    }
    case Stmt::Kind::Block:
      for (const auto& s : stmt->body)
        walk_stmt(s, signal, enclosing, out);
      return;
  }
}

std::vector<SiteInfo> collect_sites(const AstModule& module, const std::string& signal)
{
  std::vector<SiteInfo> out;
  for (const auto& item : module.items) {
    if (const auto* assign = std::get_if<AssignItem>(&item)) {
      walk_stmt(assign->stmt, signal, {}, out);
    } else if (const auto* always = std::get_if<AlwaysItem>(&item)) {
      std::set<std::string> enclosing;
      for (const auto& s : always->sensitivity)
        enclosing.insert(s.signal);
      walk_stmt(always->stmt, signal, std::move(enclosing), out);
    }
  }
  return out;
}

}  // namespace

DriverSet direct_drivers(const AstModule& module, std::string_view signal)
{
  const std::string name(signal);
  if (!module.is_declared(name))
    throw UnknownSignal(name);
  DriverSet result;
  result.target = name;
  for (auto& info : collect_sites(module, name)) {
    result.drivers.insert(info.drivers.begin(), info.drivers.end());
    result.sites.push_back(info.site);
  }
  return result;
}

TraceGraph backtrace(const AstModule& module, const std::set<std::string>& roots, int level)
{
  for (const auto& r : roots)
    if (!module.is_declared(r))
      throw UnknownSignal(r);

  TraceGraph graph;
  graph.roots = roots;
  std::deque<std::string> frontier;
  for (const auto& r : roots) {
    graph.level_of[r] = 0;
    frontier.push_back(r);
  }
  while (!frontier.empty()) {
    const auto current = frontier.front();
    frontier.pop_front();
    const int depth = graph.level_of.at(current);
    if (depth >= level)
      continue;
    for (const auto& info : collect_sites(module, current)) {
      for (const auto& driver : info.drivers) {
        graph.edges.push_back({current, driver, info.site});
        if (!graph.level_of.count(driver)) {
          graph.level_of[driver] = depth + 1;
          frontier.push_back(driver);
        }
      }
    }
  }
  return graph;
}

}  // namespace rtlagent::vlog
