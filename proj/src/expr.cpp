#include "fractaldim/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace fractaldim {

namespace {

// Recursive-descent parser building an index-based AST.
struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  std::vector<Expr>* unused = nullptr;

  explicit Parser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ValidationError("expression error at position " +
                          std::to_string(pos) + ": " + what + " in \"" + s +
                          "\"");
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.text_ = text;
  Parser p(text);

  auto add_node = [&e](Node n) {
    e.nodes_.push_back(n);
    return static_cast<int>(e.nodes_.size()) - 1;
  };

  // expr := term (('+'|'-') term)*
  // term := factor (('*'|'/') factor)*
  // factor := unary ('^' factor)?
  // unary := '-' unary | primary
  // primary := number | 'x' | '(' expr ')'
  std::function<int()> parse_expr, parse_term, parse_factor, parse_unary,
      parse_primary;

  parse_primary = [&]() -> int {
    p.skip_ws();
    if (p.pos >= p.s.size()) p.fail("unexpected end of input");
    const char c = p.s[p.pos];
    if (c == '(') {
      ++p.pos;
      const int inner = parse_expr();
      if (!p.accept(')')) p.fail("expected ')'");
      return inner;
    }
    if (c == 'x' || c == 'X') {
      ++p.pos;
      return add_node({Op::kVar, 0.0, -1, -1});
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(p.s.c_str() + p.pos, &end);
      if (end == p.s.c_str() + p.pos) p.fail("malformed number");
      p.pos = static_cast<std::size_t>(end - p.s.c_str());
      return add_node({Op::kConst, v, -1, -1});
    }
    p.fail(std::string("unexpected character '") + c + "'");
  };

  parse_unary = [&]() -> int {
    if (p.accept('-')) {
      const int a = parse_unary();
      return add_node({Op::kNeg, 0.0, a, -1});
    }
    return parse_primary();
  };

  parse_factor = [&]() -> int {
    const int base = parse_unary();
    if (p.accept('^')) {
      const int exp = parse_factor();  // right-associative
      return add_node({Op::kPow, 0.0, base, exp});
    }
    return base;
  };

  parse_term = [&]() -> int {
    int lhs = parse_factor();
    for (;;) {
      if (p.accept('*')) {
        const int rhs = parse_factor();
        lhs = add_node({Op::kMul, 0.0, lhs, rhs});
      } else if (p.accept('/')) {
        const int rhs = parse_factor();
        lhs = add_node({Op::kDiv, 0.0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  };

  parse_expr = [&]() -> int {
    int lhs = parse_term();
    for (;;) {
      if (p.accept('+')) {
        const int rhs = parse_term();
        lhs = add_node({Op::kAdd, 0.0, lhs, rhs});
      } else if (p.accept('-')) {
        const int rhs = parse_term();
        lhs = add_node({Op::kSub, 0.0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  };

  e.root_ = parse_expr();
  p.skip_ws();
  if (p.pos != p.s.size()) p.fail("trailing characters");
  return e;
}

double Expr::eval_node(int idx, double x) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::kConst:
      return n.value;
    case Op::kVar:
      return x;
    case Op::kAdd:
      return eval_node(n.a, x) + eval_node(n.b, x);
    case Op::kSub:
      return eval_node(n.a, x) - eval_node(n.b, x);
    case Op::kMul:
      return eval_node(n.a, x) * eval_node(n.b, x);
    case Op::kDiv:
      return eval_node(n.a, x) / eval_node(n.b, x);
    case Op::kPow:
      return std::pow(eval_node(n.a, x), eval_node(n.b, x));
    case Op::kNeg:
      return -eval_node(n.a, x);
  }
  return 0.0;
}

double Expr::eval(double x) const {
  if (root_ < 0) throw ValidationError("evaluating an empty expression");
  return eval_node(root_, x);
}

}  // namespace fractaldim
