#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "subriem/hamiltonian.hpp"
#include "subriem/manifolds.hpp"
#include "subriem/rng.hpp"

using namespace subriem;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec random_point(RngStream& rng, int dim, double box) {
  Vec q(dim);
  for (int i = 0; i < dim; ++i) q(i) = box * (2 * rng.uniform() - 1);
  return q;
}

// Hand-derived raised Christoffel symbols of the Heisenberg cometric at
// q = (x, y, z); every entry not listed is zero.  Derived by expanding
// Gamma^{ijk} = -1/2 sum_l (b^{il} d_l b^{jk} + b^{jl} d_l b^{ik}
//                           - b^{lk} d_l b^{ij}) term by term.
double heisenberg_gamma(const Vec& q, int i, int j, int k) {
  const double x = q(0), y = q(1);
  if (i > j) std::swap(i, j);  // symmetric in (i, j)
  if (i == 0 && j == 2 && k == 1) return -0.5;
  if (i == 0 && j == 2 && k == 2) return -x / 4;
  if (i == 1 && j == 2 && k == 0) return 0.5;
  if (i == 1 && j == 2 && k == 2) return -y / 4;
  if (i == 2 && j == 2 && k == 0) return x / 2;
  if (i == 2 && j == 2 && k == 1) return y / 2;
  return 0.0;
}

}  // namespace

TEST_CASE("energy is the cometric quadratic form") {
  const ManifoldModel m = manifolds::heisenberg_model();
  const Vec q = vec3(1.0, 2.0, 5.0);
  const Vec p = vec3(0.3, -1.0, 0.7);
  // B(1,2,5) = [[1,0,-1],[0,1,1/2],[-1,1/2,5/4]], contracted by hand.
  const double expected =
      0.5 * (0.3 * 0.3 + 1.0 + 1.25 * 0.49 + 2 * (-1.0) * 0.3 * 0.7 +
             2 * 0.5 * (-1.0) * 0.7);
  CHECK(hamiltonian::energy(m, {q, p}) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("hj_rhs at frozen phase points") {
  const ManifoldModel m = manifolds::heisenberg_model();
  hamiltonian::Workspace ws(3);
  Vec dq(3), dp(3);

  // Vertical momentum at the origin is annihilated: no motion at all.
  hamiltonian::hj_rhs(m, vec3(0, 0, 0), vec3(0, 0, 1), dq, dp, ws);
  CHECK(dq.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(dp.cwiseAbs().maxCoeff() <= 1e-15);

  // p = (1, 0, theta) at the origin: unit horizontal velocity in x, and the
  // momentum starts rotating at rate theta/2 in the p2 slot.
  const double theta = 0.8;
  hamiltonian::hj_rhs(m, vec3(0, 0, 0), vec3(1, 0, theta), dq, dp, ws);
  CHECK(dq(0) == doctest::Approx(1.0));
  CHECK(dq(1) == doctest::Approx(0.0));
  CHECK(dq(2) == doctest::Approx(0.0));
  CHECK(dp(0) == doctest::Approx(0.0));
  CHECK(dp(1) == doctest::Approx(theta / 2).epsilon(1e-14));
  CHECK(dp(2) == doctest::Approx(0.0));
}

TEST_CASE("analytic cometric derivatives match the hand-derived entries") {
  const ManifoldModel m = manifolds::heisenberg_model();
  RngStream rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec q = random_point(rng, 3, 2.0);
    const Tensor3 dB = hamiltonian::cometric_derivatives(m, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          double expected = 0.0;
          if (i == 1 && j == 2 && l == 0) expected = 0.5;
          if (i == 2 && j == 1 && l == 0) expected = 0.5;
          if (i == 2 && j == 2 && l == 0) expected = q(0) / 2;
          if (i == 0 && j == 2 && l == 1) expected = -0.5;
          if (i == 2 && j == 0 && l == 1) expected = -0.5;
          if (i == 2 && j == 2 && l == 1) expected = q(1) / 2;
          CHECK(dB(i, j, l) == doctest::Approx(expected).epsilon(1e-14));
        }
  }
}

TEST_CASE("finite-difference cometric derivatives agree with analytic ones") {
  ManifoldModel fd = manifolds::heisenberg_model();
  fd.cometric_derivatives = nullptr;  // force the FD route
  const ManifoldModel an = manifolds::heisenberg_model();
  RngStream rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec q = random_point(rng, 3, 2.0);
    const Tensor3 a = hamiltonian::cometric_derivatives(an, q);
    const Tensor3 b = hamiltonian::cometric_derivatives(fd, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
          CHECK(a(i, j, l) ==
                doctest::Approx(b(i, j, l)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("raised Christoffel symbols match the hand derivation") {
  const ManifoldModel m = manifolds::heisenberg_model();
  RngStream rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec q = random_point(rng, 3, 2.0);
    const Tensor3 gamma = hamiltonian::raised_christoffel(m, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          CHECK(gamma(i, j, k) ==
                doctest::Approx(heisenberg_gamma(q, i, j, k)).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("euclidean Christoffel symbols vanish") {
  const ManifoldModel m = manifolds::euclidean_model(3);
  const Tensor3 gamma = hamiltonian::raised_christoffel(m, vec3(0.4, -1.2, 2.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(gamma(i, j, k) == doctest::Approx(0.0));
}

TEST_CASE("RK4 flow matches the closed-form Heisenberg flow") {
  const ManifoldModel m = manifolds::heisenberg_model();
  RngStream rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    PhaseState start{random_point(rng, 3, 1.0), random_point(rng, 3, 1.5)};
    const double T = 0.2 + 1.3 * rng.uniform();
    const auto numeric = hamiltonian::flow(m, start, T, 1e-3);
    const PhaseState exact = manifolds::heisenberg_flow_exact(start, T);
    CHECK((numeric.state.q - exact.q).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((numeric.state.p - exact.p).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(numeric.energy_drift <= 1e-10);
  }
}

TEST_CASE("closed-form flow: full circle returns to the axis") {
  // At the origin with p = (1, 0, 2 pi) the planar projection completes one
  // full circle in T = 1 and z has accumulated area 1 / (4 pi).
  const double two_pi = 2 * std::numbers::pi;
  const PhaseState start{vec3(0, 0, 0), vec3(1, 0, two_pi)};
  const PhaseState end = manifolds::heisenberg_flow_exact(start, 1.0);
  CHECK(std::abs(end.q(0)) <= 1e-12);
  CHECK(std::abs(end.q(1)) <= 1e-12);
  CHECK(end.q(2) == doctest::Approx(1.0 / (4 * std::numbers::pi)).epsilon(1e-12));
  CHECK(end.p(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(end.p(1)) <= 1e-12);
  CHECK(end.p(2) == doctest::Approx(two_pi));

  const ManifoldModel m = manifolds::heisenberg_model();
  const auto numeric = hamiltonian::flow(m, start, 1.0, 1e-4);
  CHECK((numeric.state.q - end.q).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("flow is reversible") {
  const ManifoldModel m = manifolds::heisenberg_model();
  const PhaseState start{vec3(0.3, -0.7, 1.1), vec3(0.9, 0.4, -1.2)};
  const auto fwd = hamiltonian::flow(m, start, 1.0, 1e-3);
  const auto back = hamiltonian::flow(m, fwd.state, -1.0, 1e-3);
  CHECK((back.state.q - start.q).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((back.state.p - start.p).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("flow records a trace when asked") {
  const ManifoldModel m = manifolds::euclidean_model(2);
  Vec q0(2), p0(2);
  q0 << 0.0, 0.0;
  p0 << 1.0, -2.0;
  const auto res = hamiltonian::flow(m, {q0, p0}, 0.5, 0.1, /*record=*/true);
  REQUIRE(res.times.size() == res.trace.size());
  REQUIRE(res.times.size() == 6);  // t = 0 plus 5 steps
  CHECK(res.times.front() == doctest::Approx(0.0));
  CHECK(res.times.back() == doctest::Approx(0.5));
  // Straight line: q(t) = q0 + t p0.
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    CHECK(res.trace[k].q(0) == doctest::Approx(res.times[k] * 1.0).epsilon(1e-13));
    CHECK(res.trace[k].q(1) == doctest::Approx(res.times[k] * -2.0).epsilon(1e-13));
  }
}

TEST_CASE("acceleration matches the Christoffel contraction") {
  const ManifoldModel m = manifolds::heisenberg_model();
  RngStream rng(53);
  const double delta = 1e-3;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec q = random_point(rng, 3, 1.0);
    const Vec p = random_point(rng, 3, 1.5);
    const PhaseState s{q, p};
    const auto plus = hamiltonian::flow(m, s, delta, 1e-4);
    const auto minus = hamiltonian::flow(m, s, -delta, 1e-4);
    const Vec accel = (plus.state.q - 2 * q + minus.state.q) / (delta * delta);
    const Tensor3 gamma = hamiltonian::raised_christoffel(m, q);
    for (int k = 0; k < 3; ++k) {
      double contraction = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) contraction += gamma(i, j, k) * p(i) * p(j);
      CHECK(accel(k) == doctest::Approx(-contraction).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("second_derivative_along_flow matches a numeric second difference") {
  const ManifoldModel m = manifolds::heisenberg_model();
  const auto suite = polynomial_test_suite(3);
  RngStream rng(61);
  // Richardson-extrapolated centered second difference: the plain stencil at
  // delta carries a delta^2/12 * (d^4/dt^4) truncation term (~4e-6 for
  // quartic fields), which the (4*fine - coarse)/3 combination removes.
  const double delta = 2e-3;
  for (int trial = 0; trial < 3; ++trial) {
    const Vec q = random_point(rng, 3, 1.0);
    const Vec p = random_point(rng, 3, 1.5);
    const PhaseState s{q, p};
    const auto p1 = hamiltonian::flow(m, s, delta, 1e-4);
    const auto m1 = hamiltonian::flow(m, s, -delta, 1e-4);
    const auto p2 = hamiltonian::flow(m, s, delta / 2, 1e-4);
    const auto m2 = hamiltonian::flow(m, s, -delta / 2, 1e-4);
    for (const auto& f : suite) {
      const double f0 = f.value(q);
      const double coarse =
          (f.value(p1.state.q) - 2 * f0 + f.value(m1.state.q)) / (delta * delta);
      const double fine =
          (f.value(p2.state.q) - 2 * f0 + f.value(m2.state.q)) /
          (delta * delta / 4);
      const double numeric = (4 * fine - coarse) / 3;
      const double exact = hamiltonian::second_derivative_along_flow(m, s, f);
      CHECK(exact == doctest::Approx(numeric).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("integrate raises IntegrationError when the state degenerates") {
  ManifoldModel m = manifolds::euclidean_model(2);
  m.cometric = [](const Vec& q, Mat& B) {
    B.setIdentity(2, 2);
    if (std::abs(q(0)) > 0.5)
      B(0, 0) = std::numeric_limits<double>::quiet_NaN();
  };
  m.cometric_derivatives = nullptr;
  m.exact_flow = nullptr;
  Vec q(2), p(2);
  q << 0.0, 0.0;
  p << 1.0, 0.0;
  hamiltonian::Workspace ws(2);
  CHECK_THROWS_AS(hamiltonian::integrate(m, q, p, 2.0, 1e-2, ws),
                  IntegrationError);
}
