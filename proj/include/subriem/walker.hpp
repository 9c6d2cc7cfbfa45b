#pragma once

#include <Eigen/Eigenvalues>
#include <optional>
#include <vector>

#include "subriem/geometry.hpp"
#include "subriem/hamiltonian.hpp"
#include "subriem/model.hpp"
#include "subriem/rng.hpp"

namespace subriem::walker {

enum class LegIntegrator {
  Auto,  // exact flow when the model provides one, RK4 otherwise
  Rk4,
  Exact,  // requires model.exact_flow
};

// The walk runs on its own clock: leg durations are independent Exp(1)
// variables, and during a leg of duration s the phase point follows the
// Hamiltonian flow for time epsilon * s from momentum p = G(x) v, v uniform
// on the unit horizontal sphere.  Observables at diffusion time t are read
// from walks with horizon = t / epsilon^2.
struct WalkConfig {
  double epsilon = 0.1;
  double horizon = 1.0;  // walk-clock end time
  double step = hamiltonian::kDefaultStep;
  LegIntegrator integrator = LegIntegrator::Auto;
};

struct WalkPath {
  WalkConfig config;
  std::vector<double> jump_times;      // leg start times: 0 = tau_0 <= tau_1 ...
  std::vector<PhaseState> leg_states;  // (x_k, p_k) with p_k = G(x_k) v_k
  PhaseState final_state;              // at walk-clock time `horizon`
  double max_energy_drift = 0.0;       // max over legs of |H(end) - H(start)|
};

// Reusable buffers (including the eigensolver) for the per-leg redirect;
// one per worker thread.
struct Scratch {
  explicit Scratch(int d) : ws(d), B(d, d), G(d, d), q(d), p(d), v(d) {}
  hamiltonian::Workspace ws;
  Mat B, G;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  Vec q, p, v;
};

// Full path, initial direction drawn from the uniform horizontal sphere.
WalkPath sample_walk(const ManifoldModel& model, const Vec& x0,
                     const WalkConfig& cfg, RngStream& rng);

// Full path with a prescribed initial direction: v0 is projected onto the
// horizontal space (v := B G v0) and normalized to unit sub-Riemannian
// length before the momentum p0 = G v is formed.
WalkPath sample_walk(const ManifoldModel& model, const Vec& x0, const Vec& v0,
                     const WalkConfig& cfg, RngStream& rng);

// Final phase state only; no path storage, buffers reused across calls.
// Consumes the random stream exactly as sample_walk does.
PhaseState final_state(const ManifoldModel& model, const Vec& x0,
                       const WalkConfig& cfg, RngStream& rng, Scratch& scratch);

// Position at walk-clock time t in [0, horizon].  Stored leg starts (and the
// final state) are returned exactly; interior times re-integrate the
// enclosing leg from its stored state.
Vec position_at(const ManifoldModel& model, const WalkPath& path, double t);

// Integrator a walk with this config will actually use: "exact" or "rk4".
// Throws when Exact is requested but the model has no exact flow.
const char* resolved_integrator(const ManifoldModel& model,
                                const WalkConfig& cfg);

}  // namespace subriem::walker
