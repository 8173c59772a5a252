#include "hardylab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "hardylab/errors.hpp"

namespace hardylab {

struct Expr::Node {
  enum Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call1, Call2 } kind = Num;
  double value = 0.0;
  int var = 0;
  std::string fn;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

class Parser {
public:
  Parser(const std::string& s, int k) : s_(s), k_(k) {}

  NodeP run() {
    NodeP n = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }
  bool uses_r = false;

private:
  const std::string& s_;
  int k_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::InvalidConfig,
         "expression '" + s_ + "' at " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodeP make(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }
  static NodeP bin(Expr::Node::Kind k, NodeP a, NodeP b) {
    Expr::Node n;
    n.kind = k;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
  }

  NodeP expr() {
    NodeP lhs = term();
    for (;;) {
      if (eat('+')) lhs = bin(Expr::Node::Add, lhs, term());
      else if (eat('-')) lhs = bin(Expr::Node::Sub, lhs, term());
      else return lhs;
    }
  }
  NodeP term() {
    NodeP lhs = unary();
    for (;;) {
      if (eat('*')) lhs = bin(Expr::Node::Mul, lhs, unary());
      else if (eat('/')) lhs = bin(Expr::Node::Div, lhs, unary());
      else return lhs;
    }
  }
  NodeP unary() {
    if (eat('-')) {
      Expr::Node n;
      n.kind = Expr::Node::Neg;
      n.a = unary();
      return make(std::move(n));
    }
    if (eat('+')) return unary();
    return power();
  }
  // right associative, binds tighter than unary minus on the left: -x^2 = -(x^2)
  NodeP power() {
    NodeP base = primary();
    if (eat('^')) return bin(Expr::Node::Pow, base, unary());
    return base;
  }
  NodeP primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end");
    if (eat('(')) {
      NodeP n = expr();
      if (!eat(')')) error("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) error("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      Expr::Node n;
      n.value = v;
      return make(std::move(n));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "pi") {
        Expr::Node n;
        n.value = std::numbers::pi;
        return make(std::move(n));
      }
      if (name == "r" || name == "z" || (name[0] == 'z' && name.size() > 1)) {
        Expr::Node n;
        n.kind = Expr::Node::Var;
        if (name == "r") {
          n.var = 0;
          uses_r = true;
        } else if (name == "z") {
          n.var = 1;
        } else {
          const std::string digits = name.substr(1);
          for (char d : digits)
            if (!std::isdigit(static_cast<unsigned char>(d))) error("unknown name '" + name + "'");
          n.var = std::stoi(digits);
          if (n.var < 1 || n.var > k_) error("variable '" + name + "' out of range");
        }
        return make(std::move(n));
      }
      static const char* unary_fns[] = {"sin", "cos", "exp", "abs", "sqrt", "log"};
      static const char* binary_fns[] = {"min", "max"};
      for (const char* f : unary_fns) {
        if (name == f) {
          if (!eat('(')) error("expected '(' after " + name);
          Expr::Node n;
          n.kind = Expr::Node::Call1;
          n.fn = name;
          n.a = expr();
          if (!eat(')')) error("expected ')'");
          return make(std::move(n));
        }
      }
      for (const char* f : binary_fns) {
        if (name == f) {
          if (!eat('(')) error("expected '(' after " + name);
          Expr::Node n;
          n.kind = Expr::Node::Call2;
          n.fn = name;
          n.a = expr();
          if (!eat(',')) error("expected ','");
          n.b = expr();
          if (!eat(')')) error("expected ')'");
          return make(std::move(n));
        }
      }
      error("unknown name '" + name + "'");
    }
    error("unexpected '" + std::string(1, c) + "'");
  }
};

double eval_node(const Expr::Node& n, std::span<const double> v) {
  using K = Expr::Node;
  switch (n.kind) {
    case K::Num: return n.value;
    case K::Var: return v[n.var];
    case K::Neg: return -eval_node(*n.a, v);
    case K::Add: return eval_node(*n.a, v) + eval_node(*n.b, v);
    case K::Sub: return eval_node(*n.a, v) - eval_node(*n.b, v);
    case K::Mul: return eval_node(*n.a, v) * eval_node(*n.b, v);
    case K::Div: return eval_node(*n.a, v) / eval_node(*n.b, v);
    case K::Pow: return std::pow(eval_node(*n.a, v), eval_node(*n.b, v));
    case K::Call1: {
      const double x = eval_node(*n.a, v);
      switch (n.fn[0]) {
        case 's': return n.fn == "sin" ? std::sin(x) : std::sqrt(x);
        case 'c': return std::cos(x);
        case 'e': return std::exp(x);
        case 'a': return std::abs(x);
        default: return std::log(x);
      }
    }
    case K::Call2: {
      const double x = eval_node(*n.a, v), y = eval_node(*n.b, v);
      return n.fn == "min" ? std::min(x, y) : std::max(x, y);
    }
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text, int k) {
  Parser p(text, k);
  Expr e;
  e.root_ = p.run();
  e.text_ = text;
  e.uses_r_ = p.uses_r;
  return e;
}

double Expr::eval(std::span<const double> vars) const { return eval_node(*root_, vars); }

}  // namespace hardylab
