#include "subriem/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace subriem::hamiltonian {

double energy(const ManifoldModel& model, const PhaseState& s) {
  check_dim(s.q, model.dim, "energy: q");
  check_dim(s.p, model.dim, "energy: p");
  Mat B(model.dim, model.dim);
  model.cometric(s.q, B);
  return 0.5 * s.p.dot(B * s.p);
}

void cometric_derivatives(const ManifoldModel& model, const Vec& q, Tensor3& dB,
                          Workspace& ws) {
  const int d = model.dim;
  if (dB.dim() != d) dB.resize(d);
  if (model.has_analytic_derivatives()) {
    model.cometric_derivatives(q, dB);
    return;
  }
  const double h = kCometricFdStep * (1.0 + q.cwiseAbs().maxCoeff());
  ws.qt = q;
  for (int l = 0; l < d; ++l) {
    ws.qt[l] = q[l] + h;
    model.cometric(ws.qt, ws.Bp);
    ws.qt[l] = q[l] - h;
    model.cometric(ws.qt, ws.Bm);
    ws.qt[l] = q[l];
    const double inv = 1.0 / (2.0 * h);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) dB(i, j, l) = (ws.Bp(i, j) - ws.Bm(i, j)) * inv;
  }
}

Tensor3 cometric_derivatives(const ManifoldModel& model, const Vec& q) {
  check_dim(q, model.dim, "cometric_derivatives: q");
  Workspace ws(model.dim);
  Tensor3 dB(model.dim);
  cometric_derivatives(model, q, dB, ws);
  return dB;
}

void hj_rhs(const ManifoldModel& model, const Vec& q, const Vec& p, Vec& dq,
            Vec& dp, Workspace& ws) {
  const int d = model.dim;
  model.cometric(q, ws.B);
  dq.noalias() = ws.B * p;
  cometric_derivatives(model, q, ws.dB, ws);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double pk = p[k];
      for (int j = 0; j < d; ++j) s += pk * p[j] * ws.dB(k, j, i);
    }
    dp[i] = -0.5 * s;
  }
}

void rk4_step(const ManifoldModel& model, Vec& q, Vec& p, double h, Workspace& ws) {
  hj_rhs(model, q, p, ws.k1q, ws.k1p, ws);
  ws.yq = q + (0.5 * h) * ws.k1q;
  ws.yp = p + (0.5 * h) * ws.k1p;
  hj_rhs(model, ws.yq, ws.yp, ws.k2q, ws.k2p, ws);
  ws.yq = q + (0.5 * h) * ws.k2q;
  ws.yp = p + (0.5 * h) * ws.k2p;
  hj_rhs(model, ws.yq, ws.yp, ws.k3q, ws.k3p, ws);
  ws.yq = q + h * ws.k3q;
  ws.yp = p + h * ws.k3p;
  hj_rhs(model, ws.yq, ws.yp, ws.k4q, ws.k4p, ws);
  const double w = h / 6.0;
  q += w * (ws.k1q + 2.0 * ws.k2q + 2.0 * ws.k3q + ws.k4q);
  p += w * (ws.k1p + 2.0 * ws.k2p + 2.0 * ws.k3p + ws.k4p);
}

void integrate(const ManifoldModel& model, Vec& q, Vec& p, double T, double step,
               Workspace& ws) {
  if (T == 0.0) return;
  if (step <= 0.0) throw std::invalid_argument("integrate: step must be > 0");
  const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(T) / step)));
  const double h = T / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    rk4_step(model, q, p, h, ws);
    if (!q.allFinite() || !p.allFinite())
      throw IntegrationError(
          "integrate: state non-finite at t = " +
              std::to_string(static_cast<double>(i + 1) * h),
          static_cast<double>(i + 1) * h);
  }
}

FlowResult flow(const ManifoldModel& model, const PhaseState& start, double T,
                double step, bool record) {
  check_dim(start.q, model.dim, "flow: q");
  check_dim(start.p, model.dim, "flow: p");
  if (step <= 0.0) throw std::invalid_argument("flow: step must be > 0");
  Workspace ws(model.dim);
  FlowResult out;
  out.state = start;
  if (record) {
    out.times.push_back(0.0);
    out.trace.push_back(start);
  }
  if (T == 0.0) return out;
  const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(T) / step)));
  const double h = T / static_cast<double>(n);
  model.cometric(start.q, ws.B);
  const double h0 = 0.5 * start.p.dot(ws.B * start.p);
  for (long i = 0; i < n; ++i) {
    rk4_step(model, out.state.q, out.state.p, h, ws);
    const double t = static_cast<double>(i + 1) * h;
    if (!out.state.q.allFinite() || !out.state.p.allFinite())
      throw IntegrationError("flow: state non-finite at t = " + std::to_string(t), t);
    model.cometric(out.state.q, ws.B);
    const double ht = 0.5 * out.state.p.dot(ws.B * out.state.p);
    out.energy_drift = std::max(out.energy_drift, std::abs(ht - h0));
    if (record) {
      out.times.push_back(t);
      out.trace.push_back(out.state);
    }
  }
  return out;
}

Tensor3 raised_christoffel(const ManifoldModel& model, const Vec& q) {
  check_dim(q, model.dim, "raised_christoffel: q");
  const int d = model.dim;
  Workspace ws(d);
  model.cometric(q, ws.B);
  Tensor3 dB(d);
  cometric_derivatives(model, q, dB, ws);
  Tensor3 gamma(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += ws.B(i, l) * dB(j, k, l) + ws.B(j, l) * dB(i, k, l) -
               ws.B(l, k) * dB(i, j, l);
        gamma(i, j, k) = -0.5 * s;
      }
  return gamma;
}

double second_derivative_along_flow(const ManifoldModel& model,
                                    const PhaseState& s, const ScalarField& f) {
  check_dim(s.q, model.dim, "second_derivative_along_flow: q");
  check_dim(s.p, model.dim, "second_derivative_along_flow: p");
  const int d = model.dim;
  Mat B(d, d);
  model.cometric(s.q, B);
  const Vec v = B * s.p;  // qdot
  const Tensor3 gamma = raised_christoffel(model, s.q);
  const Vec grad = f.gradient(s.q);
  const Mat hess = f.hessian(s.q);
  double out = v.dot(hess * v);
  for (int k = 0; k < d; ++k) {
    double acc = 0.0;  // qddot^k = -Gamma^{ijk} p_i p_j
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) acc -= gamma(i, j, k) * s.p[i] * s.p[j];
    out += grad[k] * acc;
  }
  return out;
}

}  // namespace subriem::hamiltonian
