#pragma once

#include <vector>

#include "subriem/fields.hpp"
#include "subriem/model.hpp"
#include "subriem/types.hpp"

namespace subriem::hamiltonian {

// Default integrator step for Hamiltonian trajectories.
inline constexpr double kDefaultStep = 1e-2;
// Relative step for finite-difference cometric derivatives.
inline constexpr double kCometricFdStep = 1e-5;

// Preallocated buffers for the integrator hot path.
struct Workspace {
  explicit Workspace(int d)
      : B(d, d),
        Bp(d, d),
        Bm(d, d),
        dB(d),
        qt(d),
        yq(d),
        yp(d),
        k1q(d), k1p(d), k2q(d), k2p(d), k3q(d), k3p(d), k4q(d), k4p(d) {}
  Mat B, Bp, Bm;
  Tensor3 dB;
  Vec qt, yq, yp;
  Vec k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
};

// H(q, p) = 1/2 p^T B(q) p: kinetic energy of the cometric.
double energy(const ManifoldModel& model, const PhaseState& s);

// Coordinate derivatives of the cometric, dB(i,j,l) = d beta^{ij} / dx^l;
// analytic when the model provides them, otherwise central differences with
// step kCometricFdStep * (1 + |q|_inf).
void cometric_derivatives(const ManifoldModel& model, const Vec& q, Tensor3& dB,
                          Workspace& ws);
Tensor3 cometric_derivatives(const ManifoldModel& model, const Vec& q);

// Canonical Hamilton-Jacobi vector field for H = 1/2 p^T B(q) p:
//   dq^i/dt =      sum_j  beta^{ij}(q) p_j
//   dp_i/dt = -1/2 sum_kj p_k p_j  d beta^{kj} / dx^i
void hj_rhs(const ManifoldModel& model, const Vec& q, const Vec& p, Vec& dq,
            Vec& dp, Workspace& ws);

// One classical RK4 step of size h, in place.
void rk4_step(const ManifoldModel& model, Vec& q, Vec& p, double h, Workspace& ws);

// Propagate (q, p) for time T (signed) with uniform steps of at most `step`.
// Throws IntegrationError when the state stops being finite.
void integrate(const ManifoldModel& model, Vec& q, Vec& p, double T, double step,
               Workspace& ws);

struct FlowResult {
  PhaseState state;
  double energy_drift = 0.0;  // max_t |H(t) - H(0)| over integration steps
  std::vector<double> times;  // filled when record = true (includes t = 0)
  std::vector<PhaseState> trace;
};

// Fixed-step RK4 flow Phi_T with per-step energy monitoring.  Uses the
// model's exact flow only when asked for via integrate-free call sites;
// this function always integrates numerically so it can serve as the oracle
// side of exact-flow comparisons.
FlowResult flow(const ManifoldModel& model, const PhaseState& start, double T,
                double step = kDefaultStep, bool record = false);

// Raised Christoffel symbols
//   Gamma^{ijk} = -1/2 sum_l { beta^{il} d_l beta^{jk}
//                            + beta^{jl} d_l beta^{ik}
//                            - beta^{lk} d_l beta^{ij} },
// symmetric in (i, j); the trajectory acceleration satisfies
//   qddot^k = - sum_ij Gamma^{ijk} p_i p_j.
Tensor3 raised_christoffel(const ManifoldModel& model, const Vec& q);

// (d/dt)(d/ds) f(pi(Phi_{t+s}(q, p))) at t = s = 0, via the Christoffel
// contraction: (Bp)^T Hess f (Bp) - sum_k d_k f sum_ij Gamma^{ijk} p_i p_j.
double second_derivative_along_flow(const ManifoldModel& model,
                                    const PhaseState& s, const ScalarField& f);

}  // namespace subriem::hamiltonian
