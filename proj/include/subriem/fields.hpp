#pragma once

#include <functional>
#include <string>
#include <vector>

#include "subriem/expr.hpp"
#include "subriem/rng.hpp"
#include "subriem/types.hpp"

namespace subriem {

// Scalar observable on the manifold together with its first and second
// coordinate derivatives.  `analytic_derivatives` records whether gradient
// and hessian are exact or finite-difference approximations of `value`.
struct ScalarField {
  std::string name;
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  bool analytic_derivatives = false;
};

// Function on the cotangent bundle, F(q, p).
struct PhaseField {
  std::string name;
  std::function<double(const Vec& q, const Vec& p)> value;
};

// Sparse multivariate polynomial; exact evaluation and derivatives, used as
// the ground-truth field family in tests and verification runs.
struct Monomial {
  double coef = 0.0;
  std::vector<int> exps;  // one exponent per coordinate
};

struct Polynomial {
  int dim = 0;
  std::vector<Monomial> terms;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  Polynomial derivative(int var) const;
  expr::Expr to_expr() const;
  int degree() const;
};

// Random polynomial with 3..8 terms of total degree <= max_degree, at least
// one of degree >= 2 (fields that are affine along every trajectory would
// make variance-based checks degenerate).
Polynomial random_polynomial(int dim, int max_degree, RngStream& rng);

ScalarField field_from_polynomial(Polynomial p, std::string name);

// Field backed by a parsed expression.  With symbolic_derivatives the
// gradient/hessian come from expr::diff; otherwise they are central finite
// differences of the value (steps kFdGradStep/kFdHessStep, scaled by 1+|x|).
ScalarField field_from_expression(const expr::Expr& e, int dim, std::string name,
                                  bool symbolic_derivatives);

// Field from a plain callable; derivatives by central finite differences.
ScalarField field_from_function(std::function<double(const Vec&)> f, int dim,
                                std::string name);

inline constexpr double kFdGradStep = 1e-6;
inline constexpr double kFdHessStep = 2e-4;

// Named test fields: x y z, x2 y2 z2, xy xz yz, r2.  Coordinate names map to
// x1..x3 and require dim >= the coordinate index; r2 works in any dimension.
std::vector<std::string> field_registry_names();
ScalarField registry_field(const std::string& name, int dim);

// Deterministic polynomial fields of degree 1..4 exercising mixed partials;
// used by verification commands and tests.
std::vector<ScalarField> polynomial_test_suite(int dim);

}  // namespace subriem
