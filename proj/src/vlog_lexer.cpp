#include "rtlagent/vlog/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rtlagent::vlog {

namespace {

constexpr std::array keywords = {
    "module",   "endmodule", "input",    "output",   "inout",  "wire",    "reg",
    "integer",  "parameter", "localparam", "assign", "always", "posedge", "negedge",
    "or",       "begin",     "end",      "if",       "else",   "case",    "casez",
    "casex",    "endcase",   "default",  "initial",  "generate", "endgenerate",
    "function", "endfunction", "task",   "endtask",  "for",    "while",   "repeat",
    "forever",  "genvar",    "signed",   "unsigned", "real",   "time",    "wait",
    "deassign", "force",     "release",  "fork",     "join",   "specify", "endspecify",
};

bool ident_start(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool base_digit(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
}

// Multi-character operators, longest first.
constexpr std::array puncts = {
    "<<<", ">>>", "===", "!==", "**",  "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||",  "~&",  "~|",  "~^",  "^~",  "+:", "-:", "(",  ")",  "[",  "]",  "{",
    "}",   ";",   ",",   ":",   "?",   "@",  "#",  "=",  "+",  "-",  "*",  "/",
    "%",   "&",   "|",   "^",   "~",   "!",  "<",  ">",  ".",
};

}  // namespace

bool is_keyword(std::string_view word)
{
  return std::find(keywords.begin(), keywords.end(), word) != keywords.end();
}

std::vector<Token> lex(std::string_view src)
{
  std::vector<Token> tokens;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  const auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };

  const auto push = [&](Token::Kind kind, std::size_t begin, std::size_t end, int tline, int tcol) {
    tokens.push_back({kind, std::string(src.substr(begin, end - begin)), begin, end, tline, tcol});
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      const int start_line = line;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
        advance(1);
      if (i + 1 >= src.size())
        throw LexError{start_line, "unterminated block comment"};
      advance(2);
      continue;
    }
    const int tline = line;
    const int tcol = col;
    const std::size_t begin = i;

    if (c == '`') {
      advance(1);
      while (i < src.size() && ident_char(src[i]))
        advance(1);
      push(Token::Kind::Directive, begin, i, tline, tcol);
      // Directive arguments run to end of line; keep them in the token text.
      const std::size_t arg_begin = i;
      while (i < src.size() && src[i] != '\n')
        advance(1);
      tokens.back().text += std::string(src.substr(arg_begin, i - arg_begin));
      tokens.back().end = i;
      continue;
    }
    if (c == '"') {
      advance(1);
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size())
          advance(1);
        advance(1);
      }
      if (i >= src.size())
        throw LexError{tline, "unterminated string literal"};
      advance(1);
      push(Token::Kind::String, begin, i, tline, tcol);
      continue;
    }
    if (c == '$') {
      advance(1);
      while (i < src.size() && ident_char(src[i]))
        advance(1);
      push(Token::Kind::SystemName, begin, i, tline, tcol);
      continue;
    }
    if (ident_start(c)) {
      advance(1);
      while (i < src.size() && ident_char(src[i]))
        advance(1);
      const auto word = src.substr(begin, i - begin);
      push(is_keyword(word) ? Token::Kind::Keyword : Token::Kind::Identifier, begin, i, tline, tcol);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      // [size]'[base]digits | plain decimal
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        advance(1);
      if (i < src.size() && src[i] == '\'') {
        advance(1);
        if (i < src.size() && (src[i] == 's' || src[i] == 'S'))
          advance(1);
        if (i >= src.size())
          throw LexError{tline, "truncated based literal"};
        const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(src[i])));
        if (base != 'b' && base != 'h' && base != 'd' && base != 'o')
          throw LexError{tline, std::string("invalid literal base '") + src[i] + "'"};
        advance(1);
        bool any = false;
        while (i < src.size() && (base_digit(src[i]))) {
          // x/z digits are legal in b/h/o bases
          advance(1);
          any = true;
        }
        if (!any)
          throw LexError{tline, "based literal has no digits"};
      }
      push(Token::Kind::Number, begin, i, tline, tcol);
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      const std::string_view pv{p};
      if (src.substr(i, pv.size()) == pv) {
        advance(pv.size());
        push(Token::Kind::Punct, begin, i, tline, tcol);
        matched = true;
        break;
      }
    }
    if (!matched)
      throw LexError{tline, std::string("unexpected character '") + c + "'"};
  }

  Token end_tok;
  end_tok.kind = Token::Kind::End;
  end_tok.begin = end_tok.end = src.size();
  end_tok.line = line;
  end_tok.column = col;
  tokens.push_back(end_tok);
  return tokens;
}

}  // namespace rtlagent::vlog
