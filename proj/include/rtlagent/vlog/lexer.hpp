#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtlagent/vlog/ast.hpp"

namespace rtlagent::vlog {

struct Token {
  enum class Kind { Identifier, SystemName, Keyword, Number, String, Punct, Directive, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

/// Thrown by the lexer on malformed input; converted to a SyntaxError
/// diagnostic by the parser driver.
struct LexError {
  int line;
  std::string message;
};

/// Tokenizes Verilog source. Comments are skipped; `timescale`/`default_nettype
/// directives are produced as Directive tokens for the parser to vet.
std::vector<Token> lex(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace rtlagent::vlog
