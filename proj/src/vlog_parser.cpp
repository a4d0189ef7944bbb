#include "rtlagent/vlog/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "rtlagent/vlog/lexer.hpp"

namespace rtlagent::vlog {

namespace {

struct ParseFail {
  Diagnostic diag;
};

[[noreturn]] void fail_syntax(int line, std::string msg)
{
  throw ParseFail{{Diagnostic::Kind::SyntaxError, line, std::move(msg)}};
}

[[noreturn]] void fail_unsupported(int line, std::string construct)
{
  throw ParseFail{{Diagnostic::Kind::UnsupportedConstruct, line,
                   "unsupported construct: " + std::move(construct)}};
}

/// Folds a literal spelling to a value. Based literals with x/z/? digits
/// have no constant value.
std::optional<long long> literal_value(std::string_view text)
{
  std::string digits;
  for (char c : text)
    if (c != '_')
      digits += c;
  const auto tick = digits.find('\'');
  int base = 10;
  std::string_view body;
  if (tick == std::string::npos) {
    body = digits;
  } else {
    std::size_t p = tick + 1;
    if (p < digits.size() && (digits[p] == 's' || digits[p] == 'S'))
      ++p;
    switch (std::tolower(static_cast<unsigned char>(digits[p]))) {
      case 'b': base = 2; break;
      case 'o': base = 8; break;
      case 'd': base = 10; break;
      case 'h': base = 16; break;
      default: return std::nullopt;
    }
    body = std::string_view(digits).substr(p + 1);
  }
  if (body.empty())
    return std::nullopt;
  long long value = 0;
  for (char c : body) {
    int digit;
    if (c >= '0' && c <= '9')
      digit = c - '0';
    else if (c >= 'a' && c <= 'f')
      digit = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      digit = c - 'A' + 10;
    else
      return std::nullopt;  // x/z/? digit
    if (digit >= base)
      return std::nullopt;
    value = value * base + digit;
  }
  return value;
}

/// Constant-folds an expression over parameter values. Best effort: any
/// unknown identifier or non-arithmetic node yields nullopt.
std::optional<long long> const_eval(const ExprPtr& e, const std::map<std::string, long long>& env)
{
  if (!e)
    return std::nullopt;
  switch (e->kind) {
    case Expr::Kind::Number:
      return literal_value(e->text);
    case Expr::Kind::Identifier: {
      const auto it = env.find(e->text);
      return it == env.end() ? std::nullopt : std::optional<long long>(it->second);
    }
    case Expr::Kind::Unary: {
      const auto v = const_eval(e->operands.at(0), env);
      if (!v)
        return std::nullopt;
      if (e->op == "-")
        return -*v;
      if (e->op == "+")
        return *v;
      if (e->op == "~")
        return ~*v;
      if (e->op == "!")
        return *v == 0 ? 1 : 0;
      return std::nullopt;
    }
    case Expr::Kind::Binary: {
      const auto a = const_eval(e->operands.at(0), env);
      const auto b = const_eval(e->operands.at(1), env);
      if (!a || !b)
        return std::nullopt;
      const auto& op = e->op;
      if (op == "+") return *a + *b;
      if (op == "-") return *a - *b;
      if (op == "*") return *a * *b;
      if (op == "/") return *b == 0 ? std::optional<long long>{} : std::optional<long long>(*a / *b);
      if (op == "%") return *b == 0 ? std::optional<long long>{} : std::optional<long long>(*a % *b);
      if (op == "<<") return *a << *b;
      if (op == ">>") return *a >> *b;
      if (op == "&") return *a & *b;
      if (op == "|") return *a | *b;
      if (op == "^") return *a ^ *b;
      return std::nullopt;
    }
    case Expr::Kind::Ternary: {
      const auto c = const_eval(e->operands.at(0), env);
      if (!c)
        return std::nullopt;
      return const_eval(e->operands.at(*c != 0 ? 1 : 2), env);
    }
    default:
      return std::nullopt;
  }
}

struct PendingRange {
  ExprPtr msb;
  ExprPtr lsb;
  std::string text;
};

class Parser {
public:
  Parser(std::string_view source, std::vector<Token> tokens)
      : source_(source), tokens_(std::move(tokens))
  {
  }

  AstModule parse()
  {
    skip_directives();
    expect_keyword("module");
    AstModule mod;
    mod.source = std::string(source_);
    mod.name = expect_ident("module name");

    if (at_punct("#"))
      parse_header_parameters();
    if (at_punct("("))
      parse_port_list();
    expect_punct(";");

    while (!at_keyword("endmodule")) {
      if (peek().kind == Token::Kind::End)
        fail_syntax(peek().line, "unexpected end of input, expected 'endmodule'");
      parse_body_item();
    }
    next();  // endmodule

    finalize(mod);
    return mod;
  }

  // Single-statement entry used by parse_statement().
  StmtPtr parse_lone_statement(AssignKind* kind_out)
  {
    if (at_keyword("assign")) {
      const Token& kw = next();
      auto stmt = parse_assignment(AssignKind::Continuous, kw.begin, kw.line, kw.column);
      if (at_punct(";"))
        next();
      if (kind_out)
        *kind_out = AssignKind::Continuous;
      return stmt;
    }
    auto lhs = parse_lvalue();
    AssignKind kind;
    if (at_punct("="))
      kind = AssignKind::Blocking;
    else if (at_punct("<="))
      kind = AssignKind::NonBlocking;
    else
      fail_syntax(peek().line, "expected '=' or '<='");
    next();
    auto rhs = parse_expr();
    if (at_punct(";"))
      next();
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = Stmt::Kind::Assign;
    stmt->lhs = lhs;
    stmt->rhs = rhs;
    stmt->assign_kind = kind;
    stmt->span = {lhs->span.begin, prev_end_, lhs->span.line, lhs->span.column};
    if (kind_out)
      *kind_out = kind;
    return stmt;
  }

  bool at_end() const { return peek().kind == Token::Kind::End; }

private:
  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t prev_end_ = 0;

  // accumulated while parsing; folded in finalize()
  std::vector<Port> ports_;
  std::vector<Decl> decls_;
  std::vector<AstItem> items_;
  std::vector<PendingRange> port_ranges_;
  std::vector<PendingRange> decl_ranges_;
  std::vector<ExprPtr> param_inits_;  // aligned with decls_ (null for non-params)

  const Token& peek(std::size_t ahead = 0) const
  {
    const auto idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }

  const Token& next()
  {
    const Token& t = tokens_[pos_];
    if (t.kind != Token::Kind::End) {
      prev_end_ = t.end;
      ++pos_;
    }
    return t;
  }

  bool at_keyword(std::string_view kw) const
  {
    return peek().kind == Token::Kind::Keyword && peek().text == kw;
  }

  bool at_punct(std::string_view p) const
  {
    return peek().kind == Token::Kind::Punct && peek().text == p;
  }

  void expect_keyword(std::string_view kw)
  {
    if (!at_keyword(kw))
      fail_syntax(peek().line, "expected '" + std::string(kw) + "'");
    next();
  }

  void expect_punct(std::string_view p)
  {
    if (!at_punct(p))
      fail_syntax(peek().line,
                  "expected '" + std::string(p) + "' before '" + describe(peek()) + "'");
    next();
  }

  std::string expect_ident(std::string_view what)
  {
    if (peek().kind != Token::Kind::Identifier)
      fail_syntax(peek().line, "expected " + std::string(what));
    return next().text;
  }

  static std::string describe(const Token& t)
  {
    return t.kind == Token::Kind::End ? "end of input" : t.text;
  }

  void skip_directives()
  {
    while (peek().kind == Token::Kind::Directive) {
      const auto& t = peek();
      const auto name = t.text.substr(0, t.text.find_first_of(" \t"));
      if (name != "`timescale" && name != "`default_nettype")
        fail_unsupported(t.line, "compiler directive " + name);
      next();
    }
  }

  // ---- declarations -------------------------------------------------------

  std::optional<PendingRange> try_parse_range()
  {
    if (!at_punct("["))
      return std::nullopt;
    const Token& open = next();
    auto msb = parse_expr();
    expect_punct(":");
    auto lsb = parse_expr();
    expect_punct("]");
    PendingRange r;
    r.msb = msb;
    r.lsb = lsb;
    r.text = std::string(source_.substr(open.begin, prev_end_ - open.begin));
    return r;
  }

  void parse_header_parameters()
  {
    next();  // '#'
    expect_punct("(");
    bool expect_kw = true;
    while (true) {
      if (expect_kw || at_keyword("parameter"))
        expect_keyword("parameter");
      expect_kw = false;
      parse_one_parameter(NetKind::Parameter);
      if (at_punct(",")) {
        next();
        continue;
      }
      expect_punct(")");
      return;
    }
  }

  void parse_one_parameter(NetKind kind)
  {
    auto range = try_parse_range();
    const Token& name_tok = peek();
    const auto name = expect_ident("parameter name");
    expect_punct("=");
    auto value = parse_expr();
    Decl d;
    d.name = name;
    d.kind = kind;
    d.init_text = std::string(source_.substr(value->span.begin, value->span.end - value->span.begin));
    d.span = {name_tok.begin, prev_end_, name_tok.line, name_tok.column};
    decls_.push_back(std::move(d));
    decl_ranges_.push_back(range.value_or(PendingRange{}));
    param_inits_.push_back(value);
  }

  void parse_port_list()
  {
    next();  // '('
    if (at_punct(")")) {
      next();
      return;
    }
    const bool ansi = peek().kind == Token::Kind::Keyword &&
                      (at_keyword("input") || at_keyword("output") || at_keyword("inout"));
    if (ansi)
      parse_ansi_ports();
    else
      parse_nonansi_names();
    expect_punct(")");
  }

  static PortDir dir_from(const std::string& kw)
  {
    if (kw == "input")
      return PortDir::Input;
    if (kw == "output")
      return PortDir::Output;
    return PortDir::Inout;
  }

  void parse_ansi_ports()
  {
    PortDir dir = PortDir::Input;
    bool reg_backed = false;
    PendingRange range;
    while (true) {
      if (at_keyword("input") || at_keyword("output") || at_keyword("inout")) {
        dir = dir_from(next().text);
        reg_backed = false;
        range = PendingRange{};
        if (at_keyword("wire"))
          next();
        else if (at_keyword("reg")) {
          next();
          reg_backed = true;
        }
        if (at_keyword("signed"))
          next();
        if (auto r = try_parse_range())
          range = *r;
      }
      const Token& name_tok = peek();
      const auto name = expect_ident("port name");
      if (at_punct("="))
        fail_unsupported(peek().line, "port initializer");
      Port p;
      p.name = name;
      p.dir = dir;
      p.reg_backed = reg_backed;
      p.span = {name_tok.begin, name_tok.end, name_tok.line, name_tok.column};
      ports_.push_back(std::move(p));
      port_ranges_.push_back(range);
      if (at_punct(",")) {
        next();
        continue;
      }
      return;
    }
  }

  void parse_nonansi_names()
  {
    while (true) {
      const Token& name_tok = peek();
      const auto name = expect_ident("port name");
      Port p;
      p.name = name;
      p.dir = PortDir::Input;  // direction supplied by a body declaration
      p.span = {name_tok.begin, name_tok.end, name_tok.line, name_tok.column};
      p.range.text = "?";  // marks "direction pending" until a body decl arrives
      ports_.push_back(std::move(p));
      port_ranges_.push_back(PendingRange{});
      if (at_punct(",")) {
        next();
        continue;
      }
      return;
    }
  }

  // ---- body items ---------------------------------------------------------

  void parse_body_item()
  {
    const Token& t = peek();
    if (t.kind == Token::Kind::Directive) {
      skip_directives();
      return;
    }
    if (t.kind == Token::Kind::Keyword) {
      const auto& kw = t.text;
      if (kw == "assign") {
        parse_continuous_assign();
        return;
      }
      if (kw == "always") {
        parse_always();
        return;
      }
      if (kw == "wire" || kw == "reg" || kw == "integer") {
        parse_net_decl();
        return;
      }
      if (kw == "parameter" || kw == "localparam") {
        const auto kind = kw == "parameter" ? NetKind::Parameter : NetKind::Localparam;
        next();
        while (true) {
          parse_one_parameter(kind);
          if (at_punct(",")) {
            next();
            continue;
          }
          break;
        }
        expect_punct(";");
        return;
      }
      if (kw == "input" || kw == "output" || kw == "inout") {
        parse_body_port_decl();
        return;
      }
      if (kw == "generate" || kw == "genvar")
        fail_unsupported(t.line, "generate block");
      if (kw == "function")
        fail_unsupported(t.line, "function declaration");
      if (kw == "task")
        fail_unsupported(t.line, "task declaration");
      if (kw == "initial")
        fail_unsupported(t.line, "initial block");
      if (kw == "specify")
        fail_unsupported(t.line, "specify block");
      if (kw == "real" || kw == "time")
        fail_unsupported(t.line, kw + " declaration");
      fail_syntax(t.line, "unexpected '" + kw + "'");
    }
    if (t.kind == Token::Kind::Identifier)
      fail_unsupported(t.line, "module instantiation of '" + t.text + "'");
    if (t.kind == Token::Kind::SystemName)
      fail_unsupported(t.line, "system task " + t.text);
    fail_syntax(t.line, "unexpected '" + describe(t) + "'");
  }

  void parse_net_decl()
  {
    const Token& kw_tok = next();
    NetKind kind = NetKind::Wire;
    if (kw_tok.text == "reg")
      kind = NetKind::Reg;
    else if (kw_tok.text == "integer")
      kind = NetKind::Integer;
    if (at_keyword("signed"))
      next();
    PendingRange range;
    if (kind != NetKind::Integer) {
      if (auto r = try_parse_range())
        range = *r;
    }
    while (true) {
      const Token& name_tok = peek();
      const auto name = expect_ident("declaration name");
      if (at_punct("["))
        fail_unsupported(peek().line, "memory declaration");
      Decl d;
      d.name = name;
      d.kind = kind;
      d.span = {name_tok.begin, name_tok.end, name_tok.line, name_tok.column};
      if (at_punct("=")) {
        next();
        auto init = parse_expr();
        d.init_text = std::string(source_.substr(init->span.begin, init->span.end - init->span.begin));
        record_expr_refs(init);
        if (kind == NetKind::Wire) {
          // `wire w = e;` is a continuous assignment in disguise.
          auto lhs = std::make_shared<Expr>();
          lhs->kind = Expr::Kind::Identifier;
          lhs->text = name;
          lhs->span = {name_tok.begin, name_tok.end, name_tok.line, name_tok.column};
          auto stmt = std::make_shared<Stmt>();
          stmt->kind = Stmt::Kind::Assign;
          stmt->lhs = lhs;
          stmt->rhs = init;
          stmt->assign_kind = AssignKind::Continuous;
          stmt->span = {name_tok.begin, prev_end_, name_tok.line, name_tok.column};
          AssignItem item;
          item.stmt = stmt;
          item.span = stmt->span;
          items_.emplace_back(std::move(item));
        }
      }
      decls_.push_back(std::move(d));
      decl_ranges_.push_back(range);
      param_inits_.push_back(nullptr);
      if (at_punct(",")) {
        next();
        continue;
      }
      expect_punct(";");
      return;
    }
  }

  // `input a;` / `output reg [1:0] q;` inside the body (non-ANSI style)
  void parse_body_port_decl()
  {
    const Token& dir_tok = next();
    const PortDir dir = dir_from(dir_tok.text);
    bool reg_backed = false;
    if (at_keyword("wire"))
      next();
    else if (at_keyword("reg")) {
      next();
      reg_backed = true;
    }
    if (at_keyword("signed"))
      next();
    PendingRange range;
    if (auto r = try_parse_range())
      range = *r;
    while (true) {
      const Token& name_tok = peek();
      const auto name = expect_ident("port name");
      auto it = std::find_if(ports_.begin(), ports_.end(),
                             [&](const Port& p) { return p.name == name; });
      if (it == ports_.end())
        fail_syntax(name_tok.line, "'" + name + "' is not listed in the module port list");
      if (it->range.text != "?")
        fail_syntax(name_tok.line, "duplicate direction for port '" + name + "'");
      it->dir = dir;
      it->reg_backed = reg_backed;
      it->range.text.clear();
      port_ranges_[static_cast<std::size_t>(it - ports_.begin())] = range;
      if (at_punct(",")) {
        next();
        continue;
      }
      expect_punct(";");
      return;
    }
  }

  void parse_continuous_assign()
  {
    const Token& kw = next();
    if (at_punct("#"))
      fail_unsupported(peek().line, "assignment delay");
    bool first = true;
    while (true) {
      // Later assignments in a comma list span from their own target so
      // each slice re-parses as a standalone statement.
      const Token& at = peek();
      auto stmt = parse_assignment(AssignKind::Continuous, first ? kw.begin : at.begin,
                                   first ? kw.line : at.line, first ? kw.column : at.column);
      first = false;
      AssignItem item;
      item.stmt = stmt;
      item.span = stmt->span;
      items_.emplace_back(std::move(item));
      if (at_punct(",")) {
        next();
        continue;
      }
      expect_punct(";");
      // Extend the final statement span over the semicolon so the slice
      // reads as written.
      auto& last = std::get<AssignItem>(items_.back());
      auto extended = std::make_shared<Stmt>(*last.stmt);
      extended->span.end = prev_end_;
      last.stmt = extended;
      last.span = extended->span;
      return;
    }
  }

  StmtPtr parse_assignment(AssignKind kind, std::size_t span_begin, int line, int column)
  {
    auto lhs = parse_lvalue();
    expect_punct("=");
    auto rhs = parse_expr();
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = Stmt::Kind::Assign;
    stmt->lhs = lhs;
    stmt->rhs = rhs;
    stmt->assign_kind = kind;
    stmt->span = {span_begin, prev_end_, line, column};
    record_expr_refs(rhs);
    record_lvalue_refs(lhs);
    return stmt;
  }

  ExprPtr parse_lvalue()
  {
    if (at_punct("{")) {
      const Token& open = next();
      auto concat = std::make_shared<Expr>();
      concat->kind = Expr::Kind::Concat;
      while (true) {
        concat->operands.push_back(parse_lvalue());
        if (at_punct(",")) {
          next();
          continue;
        }
        expect_punct("}");
        break;
      }
      concat->span = {open.begin, prev_end_, open.line, open.column};
      return concat;
    }
    const Token& name_tok = peek();
    const auto name = expect_ident("assignment target");
    auto base = std::make_shared<Expr>();
    base->kind = Expr::Kind::Identifier;
    base->text = name;
    base->span = {name_tok.begin, name_tok.end, name_tok.line, name_tok.column};
    return parse_select_suffix(base);
  }

  void parse_always()
  {
    const Token& kw = next();
    AlwaysItem item;
    if (at_punct("#"))
      fail_unsupported(peek().line, "procedural delay");
    if (!at_punct("@"))
      fail_unsupported(kw.line, "always block without event control");
    next();  // '@'
    if (at_punct("*")) {
      next();
      item.star = true;
    } else {
      expect_punct("(");
      if (at_punct("*")) {
        next();
        item.star = true;
        expect_punct(")");
      } else {
        while (true) {
          SensItem s;
          if (at_keyword("posedge")) {
            next();
            s.edge = SensItem::Edge::Posedge;
          } else if (at_keyword("negedge")) {
            next();
            s.edge = SensItem::Edge::Negedge;
          }
          s.signal = expect_ident("sensitivity signal");
          item.sensitivity.push_back(std::move(s));
          if (at_keyword("or") || at_punct(",")) {
            next();
            continue;
          }
          expect_punct(")");
          break;
        }
      }
    }
    item.stmt = parse_statement_inner();
    item.span = {kw.begin, prev_end_, kw.line, kw.column};
    items_.emplace_back(std::move(item));
  }

  StmtPtr parse_statement_inner()
  {
    const Token& t = peek();
    if (t.kind == Token::Kind::Keyword) {
      if (t.text == "begin")
        return parse_block();
      if (t.text == "if")
        return parse_if();
      if (t.text == "case" || t.text == "casez")
        return parse_case(t.text == "casez");
      if (t.text == "casex")
        fail_unsupported(t.line, "casex statement");
      if (t.text == "for" || t.text == "while" || t.text == "repeat" || t.text == "forever")
        fail_unsupported(t.line, t.text + " loop");
      if (t.text == "fork")
        fail_unsupported(t.line, "fork/join block");
      if (t.text == "wait" || t.text == "force" || t.text == "release" || t.text == "deassign")
        fail_unsupported(t.line, t.text + " statement");
      fail_syntax(t.line, "unexpected '" + t.text + "' in statement position");
    }
    if (t.kind == Token::Kind::SystemName)
      fail_unsupported(t.line, "system task " + t.text);
    if (t.kind == Token::Kind::Punct && t.text == "#")
      fail_unsupported(t.line, "procedural delay");
    if (t.kind == Token::Kind::Punct && t.text == "@")
      fail_unsupported(t.line, "procedural event control");

    // Procedural assignment.
    auto lhs = parse_lvalue();
    AssignKind kind;
    if (at_punct("=")) {
      kind = AssignKind::Blocking;
    } else if (at_punct("<=")) {
      kind = AssignKind::NonBlocking;
    } else {
      fail_syntax(peek().line, "expected '=' or '<=' after assignment target");
    }
    next();
    if (at_punct("#"))
      fail_unsupported(peek().line, "assignment delay");
    auto rhs = parse_expr();
    expect_punct(";");
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = Stmt::Kind::Assign;
    stmt->lhs = lhs;
    stmt->rhs = rhs;
    stmt->assign_kind = kind;
    stmt->span = {lhs->span.begin, prev_end_, lhs->span.line, lhs->span.column};
    record_expr_refs(rhs);
    record_lvalue_refs(lhs);
    return stmt;
  }

  StmtPtr parse_block()
  {
    const Token& kw = next();  // begin
    if (at_punct(":"))
      fail_unsupported(peek().line, "named block");
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = Stmt::Kind::Block;
    while (!at_keyword("end")) {
      if (peek().kind == Token::Kind::End)
        fail_syntax(peek().line, "unexpected end of input inside begin/end block");
      stmt->body.push_back(parse_statement_inner());
    }
    next();  // end
    stmt->span = {kw.begin, prev_end_, kw.line, kw.column};
    return stmt;
  }

  StmtPtr parse_if()
  {
    const Token& kw = next();
    expect_punct("(");
    auto cond = parse_expr();
    expect_punct(")");
    record_expr_refs(cond);
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = Stmt::Kind::If;
    stmt->condition = cond;
    stmt->then_branch = parse_statement_inner();
    if (at_keyword("else")) {
      next();
      stmt->else_branch = parse_statement_inner();
    }
    stmt->span = {kw.begin, prev_end_, kw.line, kw.column};
    return stmt;
  }

  StmtPtr parse_case(bool casez)
  {
    const Token& kw = next();
    expect_punct("(");
    auto subject = parse_expr();
    expect_punct(")");
    record_expr_refs(subject);
    auto stmt = std::make_shared<Stmt>();
    stmt->kind = Stmt::Kind::Case;
    stmt->subject = subject;
    stmt->casez = casez;
    while (!at_keyword("endcase")) {
      if (peek().kind == Token::Kind::End)
        fail_syntax(peek().line, "unexpected end of input inside case statement");
      CaseArm arm;
      if (at_keyword("default")) {
        next();
        if (at_punct(":"))
          next();
      } else {
        while (true) {
          auto label = parse_expr();
          record_expr_refs(label);
          arm.labels.push_back(label);
          if (at_punct(",")) {
            next();
            continue;
          }
          break;
        }
        expect_punct(":");
      }
      arm.body = parse_statement_inner();
      stmt->arms.push_back(std::move(arm));
    }
    next();  // endcase
    stmt->span = {kw.begin, prev_end_, kw.line, kw.column};
    return stmt;
  }

  // ---- expressions --------------------------------------------------------

  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr parse_ternary()
  {
    auto cond = parse_binary(0);
    if (!at_punct("?"))
      return cond;
    next();
    auto then_e = parse_expr();
    expect_punct(":");
    auto else_e = parse_expr();
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Ternary;
    e->operands = {cond, then_e, else_e};
    e->span = {cond->span.begin, prev_end_, cond->span.line, cond->span.column};
    return e;
  }

  // Precedence table: index = binding strength, low to high.
  static int binary_level(const std::string& op)
  {
    static const std::vector<std::vector<std::string>> levels = {
        {"||"},
        {"&&"},
        {"|"},
        {"^", "~^", "^~"},
        {"&"},
        {"==", "!=", "===", "!=="},
        {"<", "<=", ">", ">="},
        {"<<", ">>", "<<<", ">>>"},
        {"+", "-"},
        {"*", "/", "%"},
        {"**"},
    };
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (std::find(levels[i].begin(), levels[i].end(), op) != levels[i].end())
        return static_cast<int>(i);
    return -1;
  }

  ExprPtr parse_binary(int min_level)
  {
    auto lhs = parse_unary();
    while (peek().kind == Token::Kind::Punct) {
      const int level = binary_level(peek().text);
      if (level < min_level)
        break;
      const auto op = next().text;
      auto rhs = parse_binary(level + 1);
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Binary;
      e->op = op;
      e->operands = {lhs, rhs};
      e->span = {lhs->span.begin, prev_end_, lhs->span.line, lhs->span.column};
      lhs = e;
    }
    return lhs;
  }

  ExprPtr parse_unary()
  {
    static const std::set<std::string> unary_ops = {"!", "~", "&", "~&", "|",
                                                    "~|", "^", "~^", "^~", "+", "-"};
    if (peek().kind == Token::Kind::Punct && unary_ops.count(peek().text)) {
      const Token& op_tok = next();
      auto operand = parse_unary();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->op = op_tok.text;
      e->operands = {operand};
      e->span = {op_tok.begin, prev_end_, op_tok.line, op_tok.column};
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_primary()
  {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      next();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Number;
      e->text = t.text;
      e->span = {t.begin, t.end, t.line, t.column};
      // `4` followed by `'b0` lexes as two tokens when separated by space.
      if (peek().kind == Token::Kind::Number && peek().text.front() == '\'') {
        const Token& cont = next();
        e->text += cont.text;
        e->span.end = cont.end;
      }
      return e;
    }
    if (t.kind == Token::Kind::Identifier) {
      next();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Identifier;
      e->text = t.text;
      e->span = {t.begin, t.end, t.line, t.column};
      return parse_select_suffix(e);
    }
    if (t.kind == Token::Kind::SystemName)
      fail_unsupported(t.line, "system function " + t.text);
    if (at_punct("(")) {
      next();
      auto inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    if (at_punct("{"))
      return parse_concat();
    fail_syntax(t.line, "expected expression before '" + describe(t) + "'");
  }

  ExprPtr parse_select_suffix(ExprPtr base)
  {
    while (at_punct("[")) {
      const auto span_begin = base->span;
      next();
      auto first = parse_expr();
      auto e = std::make_shared<Expr>();
      if (at_punct(":")) {
        next();
        auto second = parse_expr();
        e->kind = Expr::Kind::PartSelect;
        e->operands = {base, first, second};
      } else if (at_punct("+:") || at_punct("-:")) {
        e->op = next().text;
        auto width = parse_expr();
        e->kind = Expr::Kind::PartSelect;
        e->operands = {base, first, width};
      } else {
        e->kind = Expr::Kind::BitSelect;
        e->operands = {base, first};
      }
      expect_punct("]");
      e->span = {span_begin.begin, prev_end_, span_begin.line, span_begin.column};
      base = e;
    }
    return base;
  }

  ExprPtr parse_concat()
  {
    const Token& open = next();  // '{'
    auto first = parse_expr();
    if (at_punct("{")) {
      // replication {N{expr, ...}}
      next();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Replicate;
      e->operands.push_back(first);
      while (true) {
        e->operands.push_back(parse_expr());
        if (at_punct(",")) {
          next();
          continue;
        }
        expect_punct("}");
        break;
      }
      expect_punct("}");
      e->span = {open.begin, prev_end_, open.line, open.column};
      return e;
    }
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Concat;
    e->operands.push_back(first);
    while (at_punct(",")) {
      next();
      e->operands.push_back(parse_expr());
    }
    expect_punct("}");
    e->span = {open.begin, prev_end_, open.line, open.column};
    return e;
  }

  // ---- reference tracking and finalization --------------------------------

  struct Ref {
    std::string name;
    int line;
  };
  std::vector<Ref> refs_;

  void record_expr_refs(const ExprPtr& e)
  {
    if (!e)
      return;
    if (e->kind == Expr::Kind::Identifier)
      refs_.push_back({e->text, e->span.line});
    for (const auto& op : e->operands)
      record_expr_refs(op);
  }

  void record_lvalue_refs(const ExprPtr& lhs)
  {
    if (!lhs)
      return;
    if (lhs->kind == Expr::Kind::Identifier) {
      refs_.push_back({lhs->text, lhs->span.line});
      return;
    }
    for (const auto& op : lhs->operands)
      record_lvalue_refs(op);
  }

  void finalize(AstModule& mod)
  {
    std::vector<Diagnostic> diags;

    // Non-ANSI ports must have received a direction from the body.
    for (auto& p : ports_) {
      if (p.range.text == "?")
        diags.push_back({Diagnostic::Kind::SyntaxError, p.span.line,
                         "port '" + p.name + "' has no direction declaration"});
    }

    // Uniqueness. A wire/reg/integer decl may redeclare a port (the
    // classic `output q; reg q;` pattern); anything else is a duplicate.
    std::set<std::string> port_names;
    for (const auto& p : ports_) {
      if (!port_names.insert(p.name).second)
        diags.push_back({Diagnostic::Kind::SyntaxError, p.span.line,
                         "duplicate port '" + p.name + "'"});
    }
    std::set<std::string> decl_names;
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      const auto& d = decls_[i];
      if (!decl_names.insert(d.name).second) {
        diags.push_back({Diagnostic::Kind::SyntaxError, d.span.line,
                         "duplicate declaration of '" + d.name + "'"});
        continue;
      }
      if (port_names.count(d.name)) {
        const bool net_like =
            d.kind == NetKind::Wire || d.kind == NetKind::Reg || d.kind == NetKind::Integer;
        if (!net_like) {
          diags.push_back({Diagnostic::Kind::SyntaxError, d.span.line,
                           "'" + d.name + "' conflicts with a port of the same name"});
        } else if (d.kind == NetKind::Reg || d.kind == NetKind::Integer) {
          for (auto& p : ports_)
            if (p.name == d.name)
              p.reg_backed = true;
        }
      }
    }

    // Fold parameter values in declaration order.
    std::map<std::string, long long> env;
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      if (param_inits_[i]) {
        decls_[i].value = const_eval(param_inits_[i], env);
        if (decls_[i].value)
          env[decls_[i].name] = *decls_[i].value;
      }
    }

    const auto fold_range = [&](const PendingRange& pending) {
      BitRange r;
      if (!pending.msb)
        return r;
      r.scalar = false;
      r.text = pending.text;
      r.msb = const_eval(pending.msb, env);
      r.lsb = const_eval(pending.lsb, env);
      return r;
    };
    for (std::size_t i = 0; i < ports_.size(); ++i) {
      ports_[i].range = fold_range(port_ranges_[i]);
      if (port_ranges_[i].msb) {
        record_expr_refs(port_ranges_[i].msb);
        record_expr_refs(port_ranges_[i].lsb);
      }
    }
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      decls_[i].range = fold_range(decl_ranges_[i]);
      if (decl_ranges_[i].msb) {
        record_expr_refs(decl_ranges_[i].msb);
        record_expr_refs(decl_ranges_[i].lsb);
      }
    }
    // Integers are 32-bit.
    for (auto& d : decls_) {
      if (d.kind == NetKind::Integer) {
        d.range.scalar = false;
        d.range.msb = 31;
        d.range.lsb = 0;
        d.range.text = "[31:0]";
      }
    }

    mod.ports = std::move(ports_);
    mod.decls = std::move(decls_);
    mod.items = std::move(items_);

    // Sensitivity lists reference identifiers too.
    for (const auto& item : mod.items) {
      if (const auto* always = std::get_if<AlwaysItem>(&item)) {
        for (const auto& s : always->sensitivity)
          refs_.push_back({s.signal, always->span.line});
      }
    }

    // Every referenced identifier must be declared; report each name once.
    std::set<std::string> reported;
    for (const auto& ref : refs_) {
      if (mod.is_declared(ref.name) || reported.count(ref.name))
        continue;
      reported.insert(ref.name);
      diags.push_back({Diagnostic::Kind::UndeclaredIdentifier, ref.line,
                       "undeclared identifier '" + ref.name + "'"});
    }

    if (!diags.empty())
      throw SemanticFail{std::move(diags)};
  }

public:
  struct SemanticFail {
    std::vector<Diagnostic> diags;
  };
};

}  // namespace

bool AstModule::is_declared(std::string_view ident) const
{
  return find_port(ident) != nullptr || find_decl(ident) != nullptr;
}

const Port* AstModule::find_port(std::string_view name) const
{
  for (const auto& p : ports)
    if (p.name == name)
      return &p;
  return nullptr;
}

const Decl* AstModule::find_decl(std::string_view name) const
{
  for (const auto& d : decls)
    if (d.name == name)
      return &d;
  return nullptr;
}

std::vector<std::string> AstModule::declared_names() const
{
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& p : ports)
    if (seen.insert(p.name).second)
      names.push_back(p.name);
  for (const auto& d : decls)
    if (seen.insert(d.name).second)
      names.push_back(d.name);
  return names;
}

std::string to_string(Diagnostic::Kind kind)
{
  switch (kind) {
    case Diagnostic::Kind::SyntaxError: return "SyntaxError";
    case Diagnostic::Kind::UnsupportedConstruct: return "UnsupportedConstruct";
    case Diagnostic::Kind::UndeclaredIdentifier: return "UndeclaredIdentifier";
  }
  return "?";
}

std::string format_diagnostic(const Diagnostic& d)
{
  return "line " + std::to_string(d.line) + ": " + to_string(d.kind) + ": " + d.message;
}

ParseResult parse_module(std::string_view source)
{
  ParseResult result;
  try {
    auto tokens = lex(source);
    Parser parser(source, std::move(tokens));
    result.module = parser.parse();
  } catch (const LexError& e) {
    result.diagnostics.push_back({Diagnostic::Kind::SyntaxError, e.line, e.message});
  } catch (const ParseFail& e) {
    result.diagnostics.push_back(e.diag);
  } catch (const Parser::SemanticFail& e) {
    result.diagnostics = e.diags;
  }
  return result;
}

namespace {

void collect_lvalue_names(const ExprPtr& lhs, std::set<std::string>& out)
{
  if (!lhs)
    return;
  if (lhs->kind == Expr::Kind::Identifier) {
    out.insert(lhs->text);
    return;
  }
  if (lhs->kind == Expr::Kind::BitSelect || lhs->kind == Expr::Kind::PartSelect) {
    collect_lvalue_names(lhs->operands.at(0), out);
    return;
  }
  for (const auto& op : lhs->operands)
    collect_lvalue_names(op, out);
}

}  // namespace

std::optional<ParsedStatement> parse_statement(std::string_view text)
{
  try {
    auto tokens = lex(text);
    Parser parser(text, std::move(tokens));
    ParsedStatement out;
    out.stmt = parser.parse_lone_statement(&out.kind);
    if (!parser.at_end())
      return std::nullopt;
    collect_lvalue_names(out.stmt->lhs, out.lvalues);
    return out;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace rtlagent::vlog
