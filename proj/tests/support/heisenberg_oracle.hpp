#pragma once

// Independent oracle for the Heisenberg sub-Laplacian: composes
// L f = (X(X f) + Y(Y f)) / 2 with the frame
//   X = d/dx1 - (x2/2) d/dx3,   Y = d/dx2 + (x1/2) d/dx3
// purely from symbolic expression derivatives.  No cometric, Christoffel or
// flow code is involved, so agreement with the library's local formula is a
// genuine cross-check.

#include "subriem/expr.hpp"
#include "subriem/types.hpp"

namespace test_support {

inline subriem::expr::Expr heisenberg_X(const subriem::expr::Expr& f) {
  using namespace subriem::expr;
  return sub(f.diff(0), mul(div(variable(1), constant(2.0)), f.diff(2)));
}

inline subriem::expr::Expr heisenberg_Y(const subriem::expr::Expr& f) {
  using namespace subriem::expr;
  return add(f.diff(1), mul(div(variable(0), constant(2.0)), f.diff(2)));
}

inline subriem::expr::Expr heisenberg_sum_of_squares(const subriem::expr::Expr& f) {
  using namespace subriem::expr;
  return mul(constant(0.5),
             add(heisenberg_X(heisenberg_X(f)), heisenberg_Y(heisenberg_Y(f))));
}

inline double heisenberg_sum_of_squares_at(const subriem::expr::Expr& f,
                                           const subriem::Vec& q) {
  const subriem::expr::Expr L = heisenberg_sum_of_squares(f);
  return L.eval(std::span<const double>(q.data(), q.size()));
}

}  // namespace test_support
