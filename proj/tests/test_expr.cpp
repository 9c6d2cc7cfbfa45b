#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <doctest.h>

#include "subriem/expr.hpp"
#include "subriem/rng.hpp"

using namespace subriem;
using expr::Expr;
using expr::parse;

namespace {

double eval_at(const Expr& e, std::initializer_list<double> xs) {
  std::vector<double> v(xs);
  return e.eval(std::span<const double>(v.data(), v.size()));
}

// Central finite difference of an expression in one variable.
double fd_diff(const Expr& e, std::vector<double> x, int var, double h) {
  x[var] += h;
  const double up = e.eval(std::span<const double>(x.data(), x.size()));
  x[var] -= 2 * h;
  const double dn = e.eval(std::span<const double>(x.data(), x.size()));
  return (up - dn) / (2 * h);
}

}  // namespace

TEST_CASE("parse evaluates simple arithmetic") {
  CHECK(eval_at(parse("x1*x2 + 3", 2), {2.0, 5.0}) == doctest::Approx(13.0));
  CHECK(eval_at(parse("(x1^2 + x2^2)/4", 2), {1.0, 2.0}) == doctest::Approx(1.25));
  CHECK(eval_at(parse("1.5e-3", 1), {0.0}) == doctest::Approx(0.0015));
  CHECK(eval_at(parse("x1 - x2 - x3", 3), {10.0, 3.0, 2.0}) ==
        doctest::Approx(5.0));  // left associative
  CHECK(eval_at(parse("2*x1 + 3*x2", 2), {1.0, 1.0}) == doctest::Approx(5.0));
  CHECK(eval_at(parse("x1/x2/2", 2), {12.0, 3.0}) == doctest::Approx(2.0));
}

TEST_CASE("precedence: power binds tighter than unary minus") {
  CHECK(eval_at(parse("-x1^2", 1), {2.0}) == doctest::Approx(-4.0));
  CHECK(eval_at(parse("(-x1)^2", 1), {2.0}) == doctest::Approx(4.0));
  CHECK(eval_at(parse("x1^-2", 1), {2.0}) == doctest::Approx(0.25));
  CHECK(eval_at(parse("2 - -x1", 1), {3.0}) == doctest::Approx(5.0));
}

TEST_CASE("functions evaluate") {
  CHECK(eval_at(parse("sin(x1)", 1), {0.5}) == doctest::Approx(std::sin(0.5)));
  CHECK(eval_at(parse("cos(x1^2)", 1), {0.7}) ==
        doctest::Approx(std::cos(0.49)));
  CHECK(eval_at(parse("exp(-x1)", 1), {1.0}) ==
        doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("", 3), expr::ParseError);
  CHECK_THROWS_AS(parse("   ", 3), expr::ParseError);
  CHECK_THROWS_AS(parse("x4", 3), expr::ParseError);       // beyond dim
  CHECK_THROWS_AS(parse("foo(x1)", 3), expr::ParseError);  // unknown function
  CHECK_THROWS_AS(parse("x1 +", 3), expr::ParseError);
  CHECK_THROWS_AS(parse("(x1", 3), expr::ParseError);
  CHECK_THROWS_AS(parse("x1 ^ x2", 3), expr::ParseError);  // non-integer power
  CHECK_THROWS_AS(parse("x1 ^ 1.5", 3), expr::ParseError);
  CHECK_THROWS_AS(parse("x1 @ x2", 3), expr::ParseError);
  CHECK_THROWS_AS(parse("x0", 3), expr::ParseError);  // variables are 1-based

  try {
    parse("x1 + zz", 3);
    FAIL("expected ParseError");
  } catch (const expr::ParseError& e) {
    CHECK(e.position == 5);
  }
}

TEST_CASE("min_dim reports the largest variable used") {
  CHECK(parse("3.5", 5).min_dim() == 0);
  CHECK(parse("x1", 5).min_dim() == 1);
  CHECK(parse("x1 + x3^2", 5).min_dim() == 3);
}

TEST_CASE("symbolic derivatives of the core rules") {
  const Expr f = parse("x1*x2", 2);
  CHECK(eval_at(f.diff(0), {7.0, 4.0}) == doctest::Approx(4.0));
  CHECK(eval_at(f.diff(1), {7.0, 4.0}) == doctest::Approx(7.0));

  const Expr g = parse("-x2/2", 2);
  CHECK(eval_at(g.diff(1), {0.0, 9.0}) == doctest::Approx(-0.5));

  const Expr p = parse("x1^5", 1);
  CHECK(eval_at(p.diff(0), {2.0}) == doctest::Approx(80.0));  // 5 * 2^4

  const Expr chain = parse("sin(x1^2)", 1);
  CHECK(eval_at(chain.diff(0), {0.8}) ==
        doctest::Approx(std::cos(0.64) * 1.6));

  const Expr quot = parse("x1/(1 + x2)", 2);
  CHECK(eval_at(quot.diff(0), {3.0, 1.0}) == doctest::Approx(0.5));
  CHECK(eval_at(quot.diff(1), {3.0, 1.0}) == doctest::Approx(-0.75));

  const Expr e = parse("exp(2*x1)", 1);
  CHECK(eval_at(e.diff(0), {0.3}) == doctest::Approx(2 * std::exp(0.6)));
}

TEST_CASE("diff matches finite differences on composite expressions") {
  const int dim = 3;
  const std::array<const char*, 5> exprs = {
      "x1^3*x2 - x3^2/4 + sin(x1*x3)",
      "exp(-x1^2/2)*cos(x2)",
      "(x1 + x2^2)/(2 + x3^2)",
      "x1*x2*x3 + x2^4",
      "sin(cos(x1) + x2) - x3^3",
  };
  RngStream rng(2024);
  for (const char* text : exprs) {
    const Expr f = parse(text, dim);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x(dim);
      for (auto& xi : x) xi = 2.0 * rng.uniform() - 1.0;
      for (int var = 0; var < dim; ++var) {
        const double sym =
            f.diff(var).eval(std::span<const double>(x.data(), x.size()));
        const double fd = fd_diff(f, x, var, 1e-6);
        CHECK(sym == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
      }
    }
  }
}

TEST_CASE("str round-trips through parse") {
  const std::array<const char*, 6> exprs = {
      "x1*x2 + 3",    "-x1^2 + x2/4",        "sin(x1) - cos(x2)*exp(x3)",
      "(x1 + x2)^3",  "1 - x1 - x2 - 2*x3",  "x1^-2 + 0.5*x3",
  };
  RngStream rng(99);
  for (const char* text : exprs) {
    const Expr f = parse(text, 3);
    const std::string s = f.str();
    const Expr g = parse(s, 3);
    CHECK(g.str() == s);  // printing is a fixed point
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> x = {rng.uniform() + 0.5, rng.uniform() + 0.5,
                               rng.uniform() + 0.5};
      const double a = f.eval(std::span<const double>(x.data(), x.size()));
      const double b = g.eval(std::span<const double>(x.data(), x.size()));
      CHECK(a == doctest::Approx(b).epsilon(1e-14));
    }
  }
}

TEST_CASE("constant folding keeps derivatives compact") {
  // d/dx1 of a variable-free expression is the zero constant.
  const Expr c = parse("2*3 + 4^2", 1);
  CHECK(eval_at(c, {0.0}) == doctest::Approx(22.0));
  CHECK(c.diff(0).str() == "0");
  CHECK(parse("x1", 1).diff(0).str() == "1");
  // Default-constructed Expr is the constant 0 and is safe to use.
  const Expr zero;
  CHECK(eval_at(zero, {1.0}) == doctest::Approx(0.0));
  CHECK(zero.str() == "0");
}
