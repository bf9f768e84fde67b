#include "vfe/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <string>

#include "vfe/errors.hpp"

namespace vfe {

namespace {

struct Lexer {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos < text.size(); ++i, ++pos) {
      if (text[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance(1);
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }
};

class Parser {
 public:
  Parser(const Chart& chart, std::string_view text) : chart_(chart) { lex_.text = text; }

  Expr parse() {
    Expr e = expression();
    if (!lex_.eof()) lex_.fail(std::string("unexpected trailing input '") + lex_.peek() + "'");
    return e;
  }

 private:
  Expr expression() {
    Expr e = term();
    while (true) {
      const char c = lex_.peek();
      if (c == '+' || c == '-') {
        lex_.advance(1);
        Expr rhs = term();
        e = c == '+' ? e + rhs : e - rhs;
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    while (true) {
      const char c = lex_.peek();
      if (c == '*' || c == '/') {
        lex_.advance(1);
        Expr rhs = unary();
        e = c == '*' ? e * rhs : e / rhs;
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (lex_.peek() == '-') {
      lex_.advance(1);
      return -unary();
    }
    if (lex_.peek() == '+') {
      lex_.advance(1);
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (lex_.peek() == '^') {
      lex_.advance(1);
      return Expr::pow(std::move(base), exponent());
    }
    return base;
  }

  int exponent() {
    bool parens = false;
    if (lex_.peek() == '(') {
      lex_.advance(1);
      parens = true;
    }
    int sign = 1;
    if (lex_.peek() == '-') {
      lex_.advance(1);
      sign = -1;
    }
    if (!std::isdigit(static_cast<unsigned char>(lex_.peek())))
      lex_.fail("exponent must be an integer literal");
    long v = 0;
    while (lex_.pos < lex_.text.size() &&
           std::isdigit(static_cast<unsigned char>(lex_.text[lex_.pos]))) {
      v = v * 10 + (lex_.text[lex_.pos] - '0');
      if (v > 1000000) lex_.fail("exponent too large");
      lex_.advance(1);
    }
    if (lex_.pos < lex_.text.size() &&
        (lex_.text[lex_.pos] == '.' || lex_.text[lex_.pos] == 'e' || lex_.text[lex_.pos] == 'E'))
      lex_.fail("exponent must be an integer literal (use sqrt for fractional powers)");
    if (parens) {
      if (lex_.peek() != ')') lex_.fail("expected ')' after exponent");
      lex_.advance(1);
    }
    return static_cast<int>(sign * v);
  }

  Expr atom() {
    const char c = lex_.peek();
    if (c == '(') {
      lex_.advance(1);
      Expr e = expression();
      if (lex_.peek() != ')') lex_.fail("expected ')'");
      lex_.advance(1);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') lex_.fail("unexpected end of expression");
    lex_.fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    lex_.skip_ws();
    // strtod needs a terminated buffer; the view may be a slice.
    const std::string buf(lex_.text.substr(lex_.pos, 64));
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) lex_.fail("malformed number");
    lex_.advance(static_cast<size_t>(end - buf.c_str()));
    return Expr::constant(v);
  }

  Expr identifier() {
    lex_.skip_ws();
    const int line = lex_.line, col = lex_.col;
    size_t start = lex_.pos;
    while (lex_.pos < lex_.text.size() &&
           (std::isalnum(static_cast<unsigned char>(lex_.text[lex_.pos])) ||
            lex_.text[lex_.pos] == '_'))
      lex_.advance(1);
    const std::string name(lex_.text.substr(start, lex_.pos - start));
    if (lex_.peek() == '(') {
      lex_.advance(1);
      Expr arg = expression();
      if (lex_.peek() != ')') lex_.fail("expected ')' after function argument");
      lex_.advance(1);
      if (name == "sqrt") return Expr::sqrt(std::move(arg));
      if (name == "ln") return Expr::ln(std::move(arg));
      if (name == "sin") return Expr::sin(std::move(arg));
      if (name == "cos") return Expr::cos(std::move(arg));
      if (name == "atan") return Expr::atan(std::move(arg));
      throw ParseError("unknown function '" + name + "'", line, col);
    }
    const int idx = chart_.index_of(name);
    if (idx < 0) throw ParseError("unknown coordinate '" + name + "'", line, col);
    return Expr::coordinate(chart_, idx);
  }

  Chart chart_;
  Lexer lex_;
};

}  // namespace

Expr parse_expr(const Chart& chart, std::string_view text) {
  return Parser(chart, text).parse();
}

}  // namespace vfe
