#include "subriem/walker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subriem::walker {

namespace {

bool use_exact(const ManifoldModel& model, const WalkConfig& cfg) {
  switch (cfg.integrator) {
    case LegIntegrator::Rk4:
      return false;
    case LegIntegrator::Exact:
      if (!model.has_exact_flow())
        throw std::invalid_argument("walker: model '" + model.name +
                                    "' has no exact flow");
      return true;
    case LegIntegrator::Auto:
      return model.has_exact_flow();
  }
  return false;
}

// Evaluates B(q) into s.B and factors it; checks the horizontal rank.
void factor_cometric(const ManifoldModel& model, const Vec& q, Scratch& s) {
  model.cometric(q, s.B);
  if (!s.B.allFinite())
    throw ModelError("walker: cometric non-finite along the walk");
  s.es.compute(s.B);
  if (s.es.info() != Eigen::Success)
    throw ModelError("walker: eigendecomposition failed along the walk");
  const int d = model.dim;
  const Vec& ev = s.es.eigenvalues();
  const double lambda_max = ev[d - 1];
  const double threshold =
      geometry::kRankTolerance * std::max(lambda_max, 0.0);
  if (lambda_max <= 0.0 || ev[0] < -threshold)
    throw DegenerateRankError("walker: cometric not PSD along the walk", ev);
  int rank = 0;
  for (int i = 0; i < d; ++i)
    if (ev[i] > threshold) ++rank;
  if (rank != model.rank) {
    std::ostringstream msg;
    msg << "walker: cometric rank " << rank << " != declared " << model.rank;
    throw DegenerateRankError(msg.str(), ev);
  }
}

// Draws v uniform on the unit horizontal sphere at q (factor already in
// s.es) and forms the leg momentum s.p = G(q) v.
void redirect(const ManifoldModel& model, const Vec& q, RngStream& rng,
              Scratch& s) {
  const int d = model.dim;
  const int m = model.rank;
  double norm2 = 0.0;
  double u[8];  // rank is small; stack buffer avoids churn
  std::vector<double> u_heap;
  double* up = u;
  if (m > 8) {
    u_heap.resize(static_cast<std::size_t>(m));
    up = u_heap.data();
  }
  do {
    norm2 = 0.0;
    for (int i = 0; i < m; ++i) {
      up[i] = rng.normal();
      norm2 += up[i] * up[i];
    }
  } while (norm2 < 1e-24);
  const double inv = 1.0 / std::sqrt(norm2);
  s.v.setZero();
  for (int j = 0; j < m; ++j) {
    const int col = d - m + j;
    s.v += (up[j] * inv * std::sqrt(s.es.eigenvalues()[col])) *
           s.es.eigenvectors().col(col);
  }
  model.metric(q, s.G);
  s.p.noalias() = s.G * s.v;
}

// Shared walk loop; when `path` is non-null the leg structure is recorded.
void run_walk(const ManifoldModel& model, const Vec& x0, const Vec* v0,
              const WalkConfig& cfg, RngStream& rng, Scratch& s,
              WalkPath* path, PhaseState& final_out, double& drift_out) {
  check_dim(x0, model.dim, "walker: x0");
  if (!(cfg.epsilon > 0.0))
    throw std::invalid_argument("walker: epsilon must be > 0");
  if (cfg.horizon < 0.0)
    throw std::invalid_argument("walker: horizon must be >= 0");
  const bool exact = use_exact(model, cfg);

  s.q = x0;
  factor_cometric(model, s.q, s);
  if (v0 != nullptr) {
    check_dim(*v0, model.dim, "walker: v0");
    model.metric(s.q, s.G);
    // Horizontal projection B G v0, then unit sub-Riemannian length.
    s.v.noalias() = s.B * (s.G * (*v0));
    const double len2 = s.v.dot(s.G * s.v);
    if (!(len2 > 1e-24))
      throw std::invalid_argument(
          "walker: v0 has no horizontal component at x0");
    s.v /= std::sqrt(len2);
    s.p.noalias() = s.G * s.v;
  } else {
    redirect(model, s.q, rng, s);
  }

  double t = 0.0;  // walk clock
  double drift = 0.0;
  PhaseState state{s.q, s.p};
  while (true) {
    if (path != nullptr) {
      path->jump_times.push_back(t);
      path->leg_states.push_back(state);
    }
    const double draw = rng.exponential();
    const bool last = (t + draw >= cfg.horizon);
    const double dur = last ? (cfg.horizon - t) : draw;
    const double flow_time = cfg.epsilon * dur;

    const double h_start = 0.5 * state.p.dot(s.B * state.p);  // B is B(q)
    if (flow_time > 0.0) {
      if (exact) {
        state = model.exact_flow(state, flow_time);
        if (!state.q.allFinite() || !state.p.allFinite())
          throw IntegrationError("walker: exact leg non-finite", t);
      } else {
        const double step = std::min(cfg.step, flow_time / 10.0);
        hamiltonian::integrate(model, state.q, state.p, flow_time, step, s.ws);
      }
    }
    model.cometric(state.q, s.B);
    if (!s.B.allFinite())
      throw ModelError("walker: cometric non-finite along the walk");
    const double h_end = 0.5 * state.p.dot(s.B * state.p);
    drift = std::max(drift, std::abs(h_end - h_start));

    if (last) break;
    t += draw;
    // Redirect: fresh uniform horizontal direction at the new base point.
    s.q = state.q;
    factor_cometric(model, s.q, s);
    redirect(model, s.q, rng, s);
    state.p = s.p;
  }
  final_out = std::move(state);
  drift_out = drift;
}

}  // namespace

WalkPath sample_walk(const ManifoldModel& model, const Vec& x0,
                     const WalkConfig& cfg, RngStream& rng) {
  WalkPath path;
  path.config = cfg;
  Scratch s(model.dim);
  run_walk(model, x0, nullptr, cfg, rng, s, &path, path.final_state,
           path.max_energy_drift);
  return path;
}

WalkPath sample_walk(const ManifoldModel& model, const Vec& x0, const Vec& v0,
                     const WalkConfig& cfg, RngStream& rng) {
  WalkPath path;
  path.config = cfg;
  Scratch s(model.dim);
  run_walk(model, x0, &v0, cfg, rng, s, &path, path.final_state,
           path.max_energy_drift);
  return path;
}

PhaseState final_state(const ManifoldModel& model, const Vec& x0,
                       const WalkConfig& cfg, RngStream& rng, Scratch& scratch) {
  PhaseState out;
  double drift = 0.0;
  run_walk(model, x0, nullptr, cfg, rng, scratch, nullptr, out, drift);
  return out;
}

const char* resolved_integrator(const ManifoldModel& model,
                                const WalkConfig& cfg) {
  return use_exact(model, cfg) ? "exact" : "rk4";
}

Vec position_at(const ManifoldModel& model, const WalkPath& path, double t) {
  const WalkConfig& cfg = path.config;
  if (t < 0.0 || t > cfg.horizon)
    throw std::invalid_argument("position_at: t outside [0, horizon]");
  if (path.jump_times.empty())
    throw std::invalid_argument("position_at: empty path");
  if (t == cfg.horizon) return path.final_state.q;
  // Stored leg starts are exact.
  for (std::size_t k = path.jump_times.size(); k-- > 0;) {
    if (path.jump_times[k] == t) return path.leg_states[k].q;
    if (path.jump_times[k] < t) {
      const double flow_time = cfg.epsilon * (t - path.jump_times[k]);
      PhaseState s = path.leg_states[k];
      if (flow_time == 0.0) return s.q;
      if (use_exact(model, cfg)) return model.exact_flow(s, flow_time).q;
      hamiltonian::Workspace ws(model.dim);
      const double step = std::min(cfg.step, flow_time / 10.0);
      hamiltonian::integrate(model, s.q, s.p, flow_time, step, ws);
      return s.q;
    }
  }
  throw std::logic_error("position_at: time not located");  // unreachable
}

}  // namespace subriem::walker
