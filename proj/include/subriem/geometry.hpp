#pragma once

#include <string>

#include "subriem/model.hpp"
#include "subriem/rng.hpp"
#include "subriem/types.hpp"

namespace subriem::geometry {

// An eigenvalue of B(q) counts toward the horizontal rank when it exceeds
// kRankTolerance times the largest eigenvalue.
inline constexpr double kRankTolerance = 1e-10;

// Evaluate B(q) / G(q) with finiteness and symmetry checks (throws ModelError).
Mat cometric_eval(const ManifoldModel& model, const Vec& q);
Mat metric_eval(const ManifoldModel& model, const Vec& q);

// Bundle maps: beta_q(p) = B(q) p raises covectors, g_q(v) = G(q) v lowers
// vectors.  On horizontal vectors they are mutually inverse.
Vec beta_apply(const ManifoldModel& model, const Vec& q, const Vec& p);
Vec g_apply(const ManifoldModel& model, const Vec& q, const Vec& v);

// Riemannian inner product <v, w>_G(q); on horizontal vectors this is the
// sub-Riemannian metric.
double horizontal_inner(const ManifoldModel& model, const Vec& q, const Vec& v,
                        const Vec& w);

// Factor C (d x m) with C Lambda^(0) ... built from the spectral decomposition
// of B(q): columns are sqrt(lambda_a) * u_a over the m positive eigenvalues.
// Then C C^T = B(q), the columns span the horizontal space, and compatibility
// of G gives C^T G C = I_m, so v = C u with |u| = 1 lies on the unit
// horizontal sphere.  The factor is unique up to right multiplication by an
// orthogonal matrix; everything downstream is invariant under that gauge.
struct HorizontalFactor {
  Mat C;            // d x m
  Vec eigenvalues;  // all d eigenvalues of B(q), ascending
};

HorizontalFactor horizontal_factor(const ManifoldModel& model, const Vec& q);

// Uniform draw from the unit horizontal sphere at the factor's base point:
// v = C u with u uniform on S^{m-1} (normalized m-variate Gaussian).
Vec sphere_point(const HorizontalFactor& factor, RngStream& rng);
Vec sample_horizontal_sphere(const ManifoldModel& model, const Vec& q,
                             RngStream& rng);

struct CompatibilityReport {
  bool pass = false;
  int b_rank = 0;                  // eigenvalues above threshold
  Vec b_eigenvalues;               // ascending
  double g_min_eigenvalue = 0.0;   // G must be SPD
  double max_b_asymmetry = 0.0;
  double max_g_asymmetry = 0.0;
  double max_compat_residual = 0.0;  // max |B G c - c| / |c| over basis of H_q
  double max_frame_residual = 0.0;   // |C^T G C - I|_inf
  std::string detail;                // one-line failure description, empty if pass
};

// Structural checks at a single point: symmetry of B and G, PSD rank of B
// equal to the declared rank, G SPD, and the compatibility identity
// B(q) G(q) v = v on the horizontal space.
CompatibilityReport validate_compatibility(const ManifoldModel& model,
                                           const Vec& q, double tol = 1e-9);

}  // namespace subriem::geometry
