#pragma once

#include <functional>
#include <string>

#include "subriem/types.hpp"

namespace subriem {

// Coordinate-chart description of a sub-Riemannian manifold: dimension d,
// horizontal rank m <= d, a cometric B(q) (d x d symmetric PSD of rank m
// whose range is the horizontal distribution) and a compatible Riemannian
// metric G(q) (d x d SPD with B(q) G(q) v = v for horizontal v).
//
// Evaluators write into caller-provided buffers so sampling loops stay
// allocation-free.  `cometric_derivatives` and `exact_flow` are optional:
// when absent, derivatives fall back to central finite differences and
// trajectories to the fixed-step integrator.
struct ManifoldModel {
  std::string name;
  int dim = 0;
  int rank = 0;

  std::function<void(const Vec& q, Mat& B)> cometric;
  std::function<void(const Vec& q, Mat& G)> metric;
  // dB(i,j,l) = d beta^{ij} / dx^l
  std::function<void(const Vec& q, Tensor3& dB)> cometric_derivatives;
  // Exact Hamilton-Jacobi flow (q, p) -> Phi_T(q, p), when known in closed form.
  std::function<PhaseState(const PhaseState&, double T)> exact_flow;

  bool has_analytic_derivatives() const {
    return static_cast<bool>(cometric_derivatives);
  }
  bool has_exact_flow() const { return static_cast<bool>(exact_flow); }
};

}  // namespace subriem
