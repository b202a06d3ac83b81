#pragma once

#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fractaldim {

// Minimal arithmetic expression in one variable `x`: numbers, + - * /,
// parentheses, unary minus, and right-associative ^ for powers.  Used by
// expression-backed maps and weight functions in config files.
class Expr {
 public:
  Expr() = default;
  static Expr parse(const std::string& text);

  double eval(double x) const;
  bool empty() const { return nodes_.empty(); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg };
  struct Node {
    Op op;
    double value = 0.0;
    int a = -1, b = -1;
  };
  std::vector<Node> nodes_;
  int root_ = -1;
  std::string text_;
  double eval_node(int idx, double x) const;
};

}  // namespace fractaldim
