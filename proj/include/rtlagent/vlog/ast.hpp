#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rtlagent::vlog {

/// Half-open byte range into the original source, plus the 1-based
/// line/column of its first character.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

enum class PortDir { Input, Output, Inout };
enum class NetKind { Wire, Reg, Integer, Parameter, Localparam };

/// A declared bit range such as [7:0]. Scalar declarations have no range.
/// Bounds are resolved through parameter values where possible; a range
/// whose bounds cannot be folded to constants keeps only its source text.
struct BitRange {
  bool scalar = true;
  std::optional<int> msb;
  std::optional<int> lsb;
  std::string text;

  int width() const
  {
    if (scalar)
      return 1;
    if (msb && lsb)
      return std::abs(*msb - *lsb) + 1;
    return 0;  // unresolved
  }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression tree node. The shape is deliberately loose: `op` carries the
/// operator spelling for Unary/Binary, `text` the identifier or literal
/// spelling, and `operands` the children in source order.
struct Expr {
  enum class Kind {
    Identifier,
    Number,
    Unary,
    Binary,
    Ternary,
    Concat,
    Replicate,   // operands[0] = count, rest = replicated items
    BitSelect,   // operands[0] = base, operands[1] = index
    PartSelect,  // operands[0] = base, operands[1..2] = bounds
  };
  Kind kind = Kind::Number;
  std::string text;          // identifier name or literal spelling
  std::string op;            // operator for Unary/Binary; "+:"/"-:" for indexed part selects
  std::vector<ExprPtr> operands;
  SourceSpan span;
};

enum class AssignKind { Continuous, Blocking, NonBlocking };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct CaseArm {
  std::vector<ExprPtr> labels;  // empty => default
  StmtPtr body;
};

struct Stmt {
  enum class Kind { Assign, If, Case, Block };
  Kind kind = Kind::Block;

  // Assign
  ExprPtr lhs;
  ExprPtr rhs;
  AssignKind assign_kind = AssignKind::Blocking;

  // If
  ExprPtr condition;
  StmtPtr then_branch;
  StmtPtr else_branch;

  // Case
  ExprPtr subject;
  std::vector<CaseArm> arms;
  bool casez = false;

  // Block
  std::vector<StmtPtr> body;

  SourceSpan span;
};

struct SensItem {
  enum class Edge { Posedge, Negedge, Level };
  Edge edge = Edge::Level;
  std::string signal;
};

/// One `always` block. `star` marks @* / @(*) sensitivity.
struct AlwaysItem {
  bool star = false;
  std::vector<SensItem> sensitivity;
  StmtPtr stmt;
  SourceSpan span;
};

/// One continuous assignment statement (a single target=expr pair; comma
/// lists in the source produce one item each).
struct AssignItem {
  StmtPtr stmt;
  SourceSpan span;
};

using AstItem = std::variant<AssignItem, AlwaysItem>;

struct Port {
  std::string name;
  PortDir dir = PortDir::Input;
  BitRange range;
  bool reg_backed = false;
  SourceSpan span;
};

struct Decl {
  std::string name;
  NetKind kind = NetKind::Wire;
  BitRange range;
  std::optional<std::string> init_text;
  std::optional<long long> value;  // folded constant, for parameters
  SourceSpan span;
};

struct AstModule {
  std::string name;
  std::vector<Port> ports;
  std::vector<Decl> decls;
  std::vector<AstItem> items;
  std::string source;

  bool is_declared(std::string_view ident) const;
  const Port* find_port(std::string_view name) const;
  const Decl* find_decl(std::string_view name) const;
  std::vector<std::string> declared_names() const;

  std::string_view slice(const SourceSpan& span) const
  {
    return std::string_view(source).substr(span.begin, span.end - span.begin);
  }
};

struct Diagnostic {
  enum class Kind { SyntaxError, UnsupportedConstruct, UndeclaredIdentifier };
  Kind kind = Kind::SyntaxError;
  int line = 1;
  std::string message;
};

std::string to_string(Diagnostic::Kind kind);
std::string format_diagnostic(const Diagnostic& d);

}  // namespace rtlagent::vlog
