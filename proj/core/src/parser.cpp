#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "cexpr/expr.hpp"

namespace cexpr {

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+')) e = e + parse_term();
      else if (consume('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*')) e = e * parse_factor();
      else if (consume('/')) e = e / parse_factor();
      else return e;
    }
  }

  // '-' binds looser than '^': -x^2 is -(x^2)
  Expr parse_factor() {
    if (consume('-')) return -parse_factor();
    Expr base = parse_base();
    if (consume('^')) return pow(std::move(base), parse_factor());
    return base;
  }

  Expr parse_base() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
      fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark; // not an exponent; leave 'e' for the caller (e.g. "2e" is 2*? -> error later)
      }
    }
    double value = 0.0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || p != text_.data() + pos_) fail("malformed number");
    return Expr::constant(value);
  }

  Expr parse_ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (consume('(')) {
      Expr first = parse_expr();
      if (name == "mod" || name == "mod_guard") {
        if (!consume(',')) fail("'" + name + "' takes two arguments");
        Expr second = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return Expr::make_binary(name == "mod" ? NodeKind::Mod : NodeKind::ModGuard,
                                 std::move(first), std::move(second));
      }
      if (consume(',')) fail("'" + name + "' takes one argument");
      if (!consume(')')) fail("expected ')'");
      NodeKind k;
      if (name == "sin") k = NodeKind::Sin;
      else if (name == "cos") k = NodeKind::Cos;
      else if (name == "tan") k = NodeKind::Tan;
      else if (name == "exp") k = NodeKind::Exp;
      else if (name == "ln") k = NodeKind::Ln;
      else if (name == "sqrt") k = NodeKind::Sqrt;
      else if (name == "abs") k = NodeKind::Abs;
      else if (name == "sgn") k = NodeKind::Sgn;
      else fail("unknown function '" + name + "'");
      return Expr::make_unary(k, std::move(first));
    }
    if (name == "pi") return Expr::constant(3.14159265358979323846);
    if (name == "e") return Expr::constant(2.71828182845904523536);
    return Expr::variable(name);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

Expr parse(std::string_view text) {
  Parser p(text);
  return p.run();
}

} // namespace cexpr
