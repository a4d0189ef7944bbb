#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rtlagent/vlog/ast.hpp"

namespace rtlagent::vlog {

struct ParseResult {
  std::optional<AstModule> module;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return module.has_value(); }
};

/// Parses one Verilog module (synthesizable subset). On failure the result
/// carries at least one diagnostic with a 1-based line number. Pure: the
/// same text always yields a structurally identical result.
ParseResult parse_module(std::string_view source);

/// Syntax-only parse of a single assignment statement, e.g. `assign y = a;`,
/// `q <= d;` or `y = a & b;`. Returns the statement and the set of assigned
/// base identifiers. Used to validate that reported statement spans re-parse.
struct ParsedStatement {
  StmtPtr stmt;
  AssignKind kind;
  std::set<std::string> lvalues;
};
std::optional<ParsedStatement> parse_statement(std::string_view text);

}  // namespace rtlagent::vlog
