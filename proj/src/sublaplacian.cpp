#include "subriem/sublaplacian.hpp"

#include <cmath>
#include <vector>

#include "subriem/stats.hpp"

namespace subriem::sublaplacian {

namespace {

// Phi_{t}(q, p) by RK4 with a step small against |t|.
PhaseState short_flow(const ManifoldModel& model, const PhaseState& s, double t,
                      hamiltonian::Workspace& ws) {
  PhaseState out = s;
  if (t != 0.0)
    hamiltonian::integrate(model, out.q, out.p, t, std::abs(t) / 2.0, ws);
  return out;
}

}  // namespace

double dhj_derivative(const ManifoldModel& model, const PhaseField& F,
                      const PhaseState& s) {
  check_dim(s.q, model.dim, "dhj_derivative: q");
  check_dim(s.p, model.dim, "dhj_derivative: p");
  hamiltonian::Workspace ws(model.dim);
  const double h = kDhjStep;
  const PhaseState fwd = short_flow(model, s, h, ws);
  const PhaseState bwd = short_flow(model, s, -h, ws);
  return (F.value(fwd.q, fwd.p) - F.value(bwd.q, bwd.p)) / (2.0 * h);
}

MonteCarloValue projection_P(const ManifoldModel& model, const PhaseField& F,
                             const Vec& q, long n_samples, RngStream& rng) {
  check_dim(q, model.dim, "projection_P: q");
  if (n_samples < 2)
    throw std::invalid_argument("projection_P: need n_samples >= 2");
  const geometry::HorizontalFactor factor = geometry::horizontal_factor(model, q);
  const Mat G = geometry::metric_eval(model, q);
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  Vec v, p;
  for (long i = 0; i < n_samples; ++i) {
    v = geometry::sphere_point(factor, rng);
    p.noalias() = G * v;
    vals[static_cast<std::size_t>(i)] = F.value(q, p);
  }
  const MeanStderr ms = mean_stderr(vals);
  return {ms.mean, ms.stderr_, ms.n};
}

MonteCarloValue sublaplacian_sphere_avg(const ManifoldModel& model,
                                        const ScalarField& f, const Vec& q,
                                        long n_samples, RngStream& rng) {
  check_dim(q, model.dim, "sublaplacian_sphere_avg: q");
  if (n_samples < 2)
    throw std::invalid_argument("sublaplacian_sphere_avg: need n_samples >= 2");
  const geometry::HorizontalFactor factor = geometry::horizontal_factor(model, q);
  const Mat G = geometry::metric_eval(model, q);
  hamiltonian::Workspace ws(model.dim);
  const double h = kSecondDiffStep;
  const double f0 = f.value(q);
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  PhaseState s;
  s.q = q;
  for (long i = 0; i < n_samples; ++i) {
    const Vec v = geometry::sphere_point(factor, rng);
    s.q = q;
    s.p.noalias() = G * v;
    const PhaseState fwd = short_flow(model, s, h, ws);
    const PhaseState bwd = short_flow(model, s, -h, ws);
    vals[static_cast<std::size_t>(i)] =
        (f.value(fwd.q) - 2.0 * f0 + f.value(bwd.q)) / (h * h);
  }
  const MeanStderr ms = mean_stderr(vals);
  return {ms.mean, ms.stderr_, ms.n};
}

double sublaplacian_local(const ManifoldModel& model, const ScalarField& f,
                          const Vec& q) {
  check_dim(q, model.dim, "sublaplacian_local: q");
  const int d = model.dim;
  const Mat B = geometry::cometric_eval(model, q);
  const Mat G = geometry::metric_eval(model, q);
  const Tensor3 gamma = hamiltonian::raised_christoffel(model, q);
  const Mat GBG = G * B * G;
  const Vec grad = f.gradient(q);
  const Mat hess = f.hessian(q);

  double second_order = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) second_order += B(i, j) * hess(i, j);

  double first_order = 0.0;
  for (int k = 0; k < d; ++k) {
    double c = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) c += gamma(i, j, k) * GBG(i, j);
    first_order += c * grad[k];
  }
  return (second_order - first_order) / static_cast<double>(model.rank);
}

}  // namespace subriem::sublaplacian
