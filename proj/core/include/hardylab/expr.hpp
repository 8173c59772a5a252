#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hardylab {

/// Arithmetic expression over variables r, z (alias z1), z1..zk.
/// Grammar: + - * / ^, unary minus, parentheses, numbers, pi,
/// sin cos exp abs sqrt log min max.
class Expr {
public:
  struct Node;

  Expr() = default;
  /// Parse once; throws InvalidConfig on syntax errors or unknown names.
  static Expr parse(const std::string& text, int k);

  /// vars[0] = r, vars[1..k] = z_1..z_k.
  double eval(std::span<const double> vars) const;
  const std::string& text() const { return text_; }
  bool empty() const { return !root_; }
  /// True when the expression never reads r.
  bool tangential_only() const { return !uses_r_; }

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  bool uses_r_ = false;
};

}  // namespace hardylab
