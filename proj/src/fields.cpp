#include "subriem/fields.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace subriem {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

double Polynomial::value(const Vec& x) const {
  check_dim(x, dim, "Polynomial::value");
  double s = 0.0;
  for (const auto& t : terms) {
    double m = t.coef;
    for (int i = 0; i < dim; ++i) m *= ipow(x[i], t.exps[i]);
    s += m;
  }
  return s;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial d;
  d.dim = dim;
  for (const auto& t : terms) {
    if (t.exps[var] == 0) continue;
    Monomial m = t;
    m.coef *= t.exps[var];
    m.exps[var] -= 1;
    d.terms.push_back(std::move(m));
  }
  return d;
}

Vec Polynomial::gradient(const Vec& x) const {
  check_dim(x, dim, "Polynomial::gradient");
  Vec g = Vec::Zero(dim);
  for (int k = 0; k < dim; ++k) g[k] = derivative(k).value(x);
  return g;
}

Mat Polynomial::hessian(const Vec& x) const {
  check_dim(x, dim, "Polynomial::hessian");
  Mat h = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const Polynomial dk = derivative(k);
    for (int l = k; l < dim; ++l) {
      h(k, l) = dk.derivative(l).value(x);
      h(l, k) = h(k, l);
    }
  }
  return h;
}

expr::Expr Polynomial::to_expr() const {
  expr::Expr e = expr::constant(0.0);
  for (const auto& t : terms) {
    expr::Expr m = expr::constant(t.coef);
    for (int i = 0; i < dim; ++i)
      if (t.exps[i] > 0) m = expr::mul(m, expr::pow(expr::variable(i), t.exps[i]));
    e = expr::add(e, m);
  }
  return e;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

Polynomial random_polynomial(int dim, int max_degree, RngStream& rng) {
  if (dim < 1 || max_degree < 2)
    throw std::invalid_argument("random_polynomial: need dim >= 1, max_degree >= 2");
  Polynomial p;
  p.dim = dim;
  const int n_terms = 3 + static_cast<int>(rng.uniform() * 6.0);  // 3..8
  for (int t = 0; t < n_terms; ++t) {
    Monomial m;
    m.exps.assign(dim, 0);
    // Force one genuinely quadratic-or-higher term so the field is never
    // affine: index 0 gets degree in [2, max_degree].
    const int lo = (t == 0) ? 2 : 0;
    const int deg = lo + static_cast<int>(rng.uniform() * (max_degree - lo + 1));
    for (int f = 0; f < deg; ++f) {
      const int var = static_cast<int>(rng.uniform() * dim);
      m.exps[std::min(var, dim - 1)] += 1;
    }
    m.coef = -1.5 + 3.0 * rng.uniform();
    if (std::abs(m.coef) < 0.05) m.coef = 0.05;  // keep terms non-degenerate
    p.terms.push_back(std::move(m));
  }
  return p;
}

ScalarField field_from_polynomial(Polynomial p, std::string name) {
  auto shared = std::make_shared<const Polynomial>(std::move(p));
  ScalarField f;
  f.name = std::move(name);
  f.dim = shared->dim;
  f.value = [shared](const Vec& x) { return shared->value(x); };
  f.gradient = [shared](const Vec& x) { return shared->gradient(x); };
  f.hessian = [shared](const Vec& x) { return shared->hessian(x); };
  f.analytic_derivatives = true;
  return f;
}

namespace {

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  const double h = kFdGradStep * (1.0 + x.cwiseAbs().maxCoeff());
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x) {
  const double h = kFdHessStep * (1.0 + x.cwiseAbs().maxCoeff());
  const int d = static_cast<int>(x.size());
  Mat hess(d, d);
  const double f0 = f(x);
  Vec y = x;
  for (int i = 0; i < d; ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      y[i] = x[i] + h;
      y[j] = x[j] + h;
      const double fpp = f(y);
      y[j] = x[j] - h;
      const double fpm = f(y);
      y[i] = x[i] - h;
      const double fmm = f(y);
      y[j] = x[j] + h;
      const double fmp = f(y);
      y[i] = x[i];
      y[j] = x[j];
      hess(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      hess(j, i) = hess(i, j);
    }
  }
  return hess;
}

}  // namespace

ScalarField field_from_expression(const expr::Expr& e, int dim, std::string name,
                                  bool symbolic_derivatives) {
  if (e.min_dim() > dim)
    throw std::invalid_argument("field_from_expression: expression uses x" +
                                std::to_string(e.min_dim()) +
                                " but dim = " + std::to_string(dim));
  ScalarField f;
  f.name = std::move(name);
  f.dim = dim;
  f.value = [e](const Vec& x) {
    return e.eval(std::span<const double>(x.data(), x.size()));
  };
  if (symbolic_derivatives) {
    struct Derivs {
      std::vector<expr::Expr> grad;
      std::vector<expr::Expr> hess;  // row-major d*d, symmetric
    };
    auto dv = std::make_shared<Derivs>();
    dv->grad.reserve(dim);
    for (int i = 0; i < dim; ++i) dv->grad.push_back(e.diff(i));
    dv->hess.resize(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        expr::Expr dij = dv->grad[i].diff(j);
        dv->hess[static_cast<std::size_t>(i) * dim + j] = dij;
        dv->hess[static_cast<std::size_t>(j) * dim + i] = dij;
      }
    f.gradient = [dv, dim](const Vec& x) {
      Vec g(dim);
      std::span<const double> xs(x.data(), x.size());
      for (int i = 0; i < dim; ++i) g[i] = dv->grad[i].eval(xs);
      return g;
    };
    f.hessian = [dv, dim](const Vec& x) {
      Mat h(dim, dim);
      std::span<const double> xs(x.data(), x.size());
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          h(i, j) = dv->hess[static_cast<std::size_t>(i) * dim + j].eval(xs);
      return h;
    };
    f.analytic_derivatives = true;
  } else {
    auto value = f.value;
    f.gradient = [value](const Vec& x) { return fd_gradient(value, x); };
    f.hessian = [value](const Vec& x) { return fd_hessian(value, x); };
    f.analytic_derivatives = false;
  }
  return f;
}

ScalarField field_from_function(std::function<double(const Vec&)> f, int dim,
                                std::string name) {
  ScalarField s;
  s.name = std::move(name);
  s.dim = dim;
  s.value = std::move(f);
  auto value = s.value;
  s.gradient = [value](const Vec& x) { return fd_gradient(value, x); };
  s.hessian = [value](const Vec& x) { return fd_hessian(value, x); };
  s.analytic_derivatives = false;
  return s;
}

namespace {

Polynomial monomial_poly(int dim, std::vector<std::pair<int, int>> var_exps,
                         double coef = 1.0) {
  Polynomial p;
  p.dim = dim;
  Monomial m;
  m.coef = coef;
  m.exps.assign(dim, 0);
  for (auto [v, e] : var_exps) m.exps[v] += e;
  p.terms.push_back(std::move(m));
  return p;
}

}  // namespace

std::vector<std::string> field_registry_names() {
  return {"x", "y", "z", "x2", "y2", "z2", "xy", "xz", "yz", "r2"};
}

ScalarField registry_field(const std::string& name, int dim) {
  auto coord = [&](int v, int e, const char* label) {
    if (dim <= v)
      throw std::invalid_argument(std::string("field '") + label +
                                  "' needs dim >= " + std::to_string(v + 1));
    return field_from_polynomial(monomial_poly(dim, {{v, e}}), label);
  };
  auto pair_field = [&](int v, int w, const char* label) {
    if (dim <= std::max(v, w))
      throw std::invalid_argument(std::string("field '") + label +
                                  "' needs dim >= " + std::to_string(std::max(v, w) + 1));
    return field_from_polynomial(monomial_poly(dim, {{v, 1}, {w, 1}}), label);
  };
  if (name == "x") return coord(0, 1, "x");
  if (name == "y") return coord(1, 1, "y");
  if (name == "z") return coord(2, 1, "z");
  if (name == "x2") return coord(0, 2, "x2");
  if (name == "y2") return coord(1, 2, "y2");
  if (name == "z2") return coord(2, 2, "z2");
  if (name == "xy") return pair_field(0, 1, "xy");
  if (name == "xz") return pair_field(0, 2, "xz");
  if (name == "yz") return pair_field(1, 2, "yz");
  if (name == "r2") {
    Polynomial p;
    p.dim = dim;
    for (int i = 0; i < dim; ++i) {
      Monomial m;
      m.coef = 1.0;
      m.exps.assign(dim, 0);
      m.exps[i] = 2;
      p.terms.push_back(std::move(m));
    }
    return field_from_polynomial(std::move(p), "r2");
  }
  throw std::invalid_argument("unknown field '" + name +
                              "'; known: x y z x2 y2 z2 xy xz yz r2");
}

std::vector<ScalarField> polynomial_test_suite(int dim) {
  if (dim < 1) throw std::invalid_argument("polynomial_test_suite: dim >= 1");
  std::vector<ScalarField> suite;
  auto push = [&](Polynomial p, std::string name) {
    suite.push_back(field_from_polynomial(std::move(p), std::move(name)));
  };
  const int c = std::min(dim, 3);
  for (int i = 0; i < c; ++i)
    push(monomial_poly(dim, {{i, 1}}), "x" + std::to_string(i + 1));
  for (int i = 0; i < c; ++i)
    push(monomial_poly(dim, {{i, 2}}), "x" + std::to_string(i + 1) + "^2");
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j)
      push(monomial_poly(dim, {{i, 1}, {j, 1}}),
           "x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1));
  {
    Polynomial p;
    p.dim = dim;
    for (int i = 0; i < dim; ++i) {
      Monomial m;
      m.coef = 1.0;
      m.exps.assign(dim, 0);
      m.exps[i] = 2;
      p.terms.push_back(std::move(m));
    }
    push(std::move(p), "r2");
  }
  push(monomial_poly(dim, {{0, 3}}), "x1^3");
  if (dim >= 2) {
    push(monomial_poly(dim, {{0, 2}, {1, 1}}), "x1^2*x2");
    push(monomial_poly(dim, {{0, 2}, {1, 2}}), "x1^2*x2^2");
  }
  if (dim >= 3) {
    push(monomial_poly(dim, {{0, 1}, {1, 1}, {2, 1}}), "x1*x2*x3");
    push(monomial_poly(dim, {{2, 2}, {0, 1}}, 0.5), "0.5*x1*x3^2");
    push(monomial_poly(dim, {{2, 4}}), "x3^4");
  }
  {
    // x1^4 - 2 x1^2 xlast^2 + xlast: mixed quartic with a linear tail.
    Polynomial p;
    p.dim = dim;
    Monomial a;
    a.coef = 1.0;
    a.exps.assign(dim, 0);
    a.exps[0] = 4;
    Monomial b;
    b.coef = -2.0;
    b.exps.assign(dim, 0);
    b.exps[0] = 2;
    b.exps[dim - 1] += 2;
    Monomial d;
    d.coef = 1.0;
    d.exps.assign(dim, 0);
    d.exps[dim - 1] = 1;
    p.terms = {a, b, d};
    push(std::move(p), "quartic_mix");
  }
  return suite;
}

}  // namespace subriem
