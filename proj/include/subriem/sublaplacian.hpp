#pragma once

#include "subriem/fields.hpp"
#include "subriem/geometry.hpp"
#include "subriem/hamiltonian.hpp"
#include "subriem/model.hpp"
#include "subriem/rng.hpp"

namespace subriem::sublaplacian {

// Step for the centered first difference in dhj_derivative.
inline constexpr double kDhjStep = 1e-4;
// Step for the centered second difference in sublaplacian_sphere_avg.
inline constexpr double kSecondDiffStep = 1e-3;

struct MonteCarloValue {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n = 0;
};

// D_HJ F (q, p) = d/dt F(Phi_t(q, p)) at t = 0, by a centered difference of
// the numerically integrated flow.
double dhj_derivative(const ManifoldModel& model, const PhaseField& F,
                      const PhaseState& s);

// P F (q) = average of F(q, g(v)) over v uniform on the unit horizontal
// sphere at q (Monte Carlo).
MonteCarloValue projection_P(const ManifoldModel& model, const PhaseField& F,
                             const Vec& q, long n_samples, RngStream& rng);

// Sub-Laplacian by its definition: the average over unit horizontal
// directions v of (d/dt)^2 f(pi(Phi_t(q, g(v)))) at t = 0.  The second
// derivative is a centered second difference of f along the integrated
// trajectory, so this route shares no Christoffel code with
// sublaplacian_local and serves as its cross-check.
MonteCarloValue sublaplacian_sphere_avg(const ManifoldModel& model,
                                        const ScalarField& f, const Vec& q,
                                        long n_samples, RngStream& rng);

// Sub-Laplacian in local coordinates:
//   L f = (1/m) [ sum_ij beta^{ij} d_i d_j f
//               - sum_ijk Gamma^{ijk} (G B G)_{ij} d_k f ].
double sublaplacian_local(const ManifoldModel& model, const ScalarField& f,
                          const Vec& q);

}  // namespace subriem::sublaplacian
