#include "hypertri/expression.hpp"

#include "hypertri/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>

namespace hypertri::expr {

namespace {

struct Node {
  ScalarSymbol sym;
  std::optional<Complex> value;
  bool bracket = false;
};

Node folded(Complex v) { return {symbols::constant(v), v, false}; }

class Parser {
public:
  explicit Parser(std::string_view s) : s_(s) {}

  Node parse() {
    Node n = expr();
    skip();
    if (pos_ != s_.size())
      fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression: " + what + " at column " + std::to_string(pos_ + 1) + " in \"" + std::string(s_) +
                     "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      fail(std::string("expected '") + c + "'");
  }

  Node expr() {
    Node a = term();
    for (;;) {
      if (accept('+'))
        a = add(a, term(), 1.0);
      else if (accept('-'))
        a = add(a, term(), -1.0);
      else
        return a;
    }
  }

  Node term() {
    Node a = unary();
    for (;;) {
      if (accept('*')) {
        a = mul(a, unary());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Node b = unary();
        if (b.value && *b.value == Complex(0.0)) {
          pos_ = at;
          fail("division by zero");
        }
        a = b.value ? mul(a, folded(1.0 / *b.value)) : (a.value ? Node{*a.value * symbols::pow(b.sym, -1.0), {}, false}
                                                                : Node{a.sym / b.sym, {}, false});
      } else {
        return a;
      }
    }
  }

  Node unary() {
    if (accept('-')) {
      Node a = unary();
      return a.value ? folded(-*a.value) : Node{-a.sym, {}, false};
    }
    if (accept('+'))
      return unary();
    return power();
  }

  Node power() {
    Node base = primary();
    if (!accept('^'))
      return base;
    const std::size_t at = pos_;
    const Node e = unary();
    if (!e.value || std::abs(e.value->imag()) > 0.0) {
      pos_ = at;
      fail("exponent must be a real constant");
    }
    const double p = e.value->real();
    if (base.value)
      return folded(std::pow(*base.value, p));
    if (base.bracket)
      return {symbols::bracket_power(p), {}, false};
    if (p >= 0 && p <= 16 && p == std::floor(p)) {
      Node out = folded(1.0);
      for (int k = 0; k < static_cast<int>(p); ++k)
        out = mul(out, base);
      return out;
    }
    return {symbols::pow(base.sym, p), {}, false};
  }

  Node primary() {
    skip();
    if (pos_ >= s_.size())
      fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (accept('(')) {
      Node n = expr();
      expect(')');
      return n;
    }
    if (!std::isalpha(static_cast<unsigned char>(c)))
      fail("unexpected '" + std::string(1, c) + "'");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "pi")
      return folded(std::numbers::pi);
    if (id == "i")
      return folded(Complex(0.0, 1.0));
    if (id == "t")
      return {symbols::t(), {}, false};
    if (id == "x")
      return {symbols::x(), {}, false};
    if (id == "xi")
      return {symbols::xi(), {}, false};
    if (id == "bracket") {
      expect('(');
      skip();
      if (s_.substr(pos_, 2) != "xi" ||
          (pos_ + 2 < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_ + 2])) || s_[pos_ + 2] == '_')))
        fail("bracket takes xi as its argument");
      pos_ += 2;
      expect(')');
      return {symbols::bracket_power(1.0), {}, true};
    }
    if (id == "sin" || id == "cos" || id == "exp") {
      expect('(');
      const std::size_t at = pos_;
      const Node a = expr();
      expect(')');
      if (a.value) {
        const Complex v = *a.value;
        return folded(id == "sin" ? std::sin(v) : id == "cos" ? std::cos(v) : std::exp(v));
      }
      if (a.sym.depends_on_xi()) {
        pos_ = at;
        fail(id + " of an expression in xi is not a symbol");
      }
      return {id == "sin" ? symbols::sin(a.sym) : id == "cos" ? symbols::cos(a.sym) : symbols::exp(a.sym), {}, false};
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  Node number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str())
      fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return folded(v);
  }

  static Node add(const Node& a, const Node& b, double sign) {
    if (a.value && b.value)
      return folded(*a.value + sign * *b.value);
    if (b.value && *b.value == Complex(0.0))
      return a;
    if (a.value && *a.value == Complex(0.0))
      return sign > 0 ? b : Node{-b.sym, {}, false};
    return {sign > 0 ? a.sym + b.sym : a.sym - b.sym, {}, false};
  }

  static Node mul(const Node& a, const Node& b) {
    if (a.value && b.value)
      return folded(*a.value * *b.value);
    if ((a.value && *a.value == Complex(0.0)) || (b.value && *b.value == Complex(0.0)))
      return folded(0.0);
    if (a.value)
      return *a.value == Complex(1.0) ? b : Node{*a.value * b.sym, {}, false};
    if (b.value)
      return *b.value == Complex(1.0) ? a : Node{*b.value * a.sym, {}, false};
    return {a.sym * b.sym, {}, false};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

} // namespace

ScalarSymbol parse_symbol(std::string_view text) {
  const Node n = Parser(text).parse();
  if (!n.value)
    return n.sym;
  return *n.value == Complex(0.0) ? symbols::zero() : symbols::constant(*n.value);
}

std::function<Complex(double t, double x)> parse_data(std::string_view text) {
  const ScalarSymbol s = parse_symbol(text);
  if (s.depends_on_xi())
    throw ParseError("expression: data must not depend on xi in \"" + std::string(text) + "\"");
  return [s](double t, double x) { return s(t, x, 0.0); };
}

} // namespace hypertri::expr
