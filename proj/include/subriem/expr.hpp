#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace subriem::expr {

// Syntax or validation error in an expression, with the 0-based character
// offset where it was detected.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at offset " + std::to_string(position) +
                           ")"),
        position(position) {}
  std::size_t position;
};

namespace detail {
struct Node;
}

// Immutable scalar expression in variables x1..xd.  Values are built by
// parse() or by the symbolic operations below; sharing is by reference, so
// copies are cheap.
class Expr {
 public:
  Expr();  // the constant 0

  double eval(std::span<const double> x) const;

  // Symbolic partial derivative with respect to variable `var` (0-based).
  Expr diff(int var) const;

  // Prints with minimal parentheses; parse(str()) reproduces the value.
  std::string str() const;

  // Largest variable index used, plus one (0 for constants).
  int min_dim() const;

  explicit Expr(std::shared_ptr<const detail::Node> node);
  const std::shared_ptr<const detail::Node>& node() const { return node_; }

 private:
  std::shared_ptr<const detail::Node> node_;
};

// Parses `text` over variables x1..x<dim>.  Grammar: + - * / unary-minus,
// ^ with integer exponents, sin/cos/exp, parentheses, decimal literals.
// Precedence ^ > unary- > */ > +-, binary operators left-associative.
Expr parse(std::string_view text, int dim);

// Expression constructors, exposed for programmatic building (test oracles,
// polynomial conversion).  Constant subexpressions are folded.
Expr constant(double c);
Expr variable(int index);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& a, int n);
Expr neg(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);

}  // namespace subriem::expr
