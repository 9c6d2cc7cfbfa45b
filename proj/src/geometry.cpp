#include "subriem/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace subriem::geometry {

namespace {

void check_symmetric(const Mat& a, const char* label) {
  if (!a.allFinite())
    throw ModelError(std::string(label) + ": non-finite entries");
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw ModelError(std::string(label) + ": not symmetric (asymmetry " +
                     std::to_string(asym) + ")");
}

}  // namespace

Mat cometric_eval(const ManifoldModel& model, const Vec& q) {
  check_dim(q, model.dim, "cometric_eval: q");
  Mat B(model.dim, model.dim);
  model.cometric(q, B);
  check_symmetric(B, "cometric");
  return B;
}

Mat metric_eval(const ManifoldModel& model, const Vec& q) {
  check_dim(q, model.dim, "metric_eval: q");
  Mat G(model.dim, model.dim);
  model.metric(q, G);
  check_symmetric(G, "metric");
  return G;
}

Vec beta_apply(const ManifoldModel& model, const Vec& q, const Vec& p) {
  check_dim(p, model.dim, "beta_apply: p");
  return cometric_eval(model, q) * p;
}

Vec g_apply(const ManifoldModel& model, const Vec& q, const Vec& v) {
  check_dim(v, model.dim, "g_apply: v");
  return metric_eval(model, q) * v;
}

double horizontal_inner(const ManifoldModel& model, const Vec& q, const Vec& v,
                        const Vec& w) {
  check_dim(v, model.dim, "horizontal_inner: v");
  check_dim(w, model.dim, "horizontal_inner: w");
  return v.dot(metric_eval(model, q) * w);
}

HorizontalFactor horizontal_factor(const ManifoldModel& model, const Vec& q) {
  const Mat B = cometric_eval(model, q);
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success)
    throw ModelError("horizontal_factor: eigendecomposition failed");
  const Vec& ev = es.eigenvalues();  // ascending
  const int d = model.dim;
  const double lambda_max = ev[d - 1];
  if (lambda_max <= 0.0)
    throw DegenerateRankError("horizontal_factor: cometric has no positive eigenvalue",
                              ev);
  const double threshold = kRankTolerance * lambda_max;
  if (ev[0] < -threshold)
    throw ModelError("horizontal_factor: cometric has negative eigenvalue " +
                     std::to_string(ev[0]));
  int rank = 0;
  for (int i = 0; i < d; ++i)
    if (ev[i] > threshold) ++rank;
  if (rank != model.rank) {
    std::ostringstream msg;
    msg << "horizontal_factor: cometric rank " << rank << " != declared rank "
        << model.rank << " (eigenvalues:";
    for (int i = 0; i < d; ++i) msg << ' ' << ev[i];
    msg << ')';
    throw DegenerateRankError(msg.str(), ev);
  }
  HorizontalFactor f;
  f.eigenvalues = ev;
  f.C.resize(d, rank);
  for (int j = 0; j < rank; ++j) {
    const int col = d - rank + j;  // the top `rank` eigenpairs
    f.C.col(j) = es.eigenvectors().col(col) * std::sqrt(ev[col]);
  }
  return f;
}

Vec sphere_point(const HorizontalFactor& factor, RngStream& rng) {
  const int m = static_cast<int>(factor.C.cols());
  Vec u(m);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < m; ++i) u[i] = rng.normal();
    norm2 = u.squaredNorm();
  } while (norm2 < 1e-24);  // guards the measure-zero near-origin draw
  u /= std::sqrt(norm2);
  return factor.C * u;
}

Vec sample_horizontal_sphere(const ManifoldModel& model, const Vec& q,
                             RngStream& rng) {
  return sphere_point(horizontal_factor(model, q), rng);
}

CompatibilityReport validate_compatibility(const ManifoldModel& model,
                                           const Vec& q, double tol) {
  CompatibilityReport r;
  Mat B(model.dim, model.dim), G(model.dim, model.dim);
  model.cometric(q, B);
  model.metric(q, G);
  std::ostringstream why;

  if (!B.allFinite() || !G.allFinite()) {
    r.detail = "non-finite cometric or metric entries";
    return r;
  }
  r.max_b_asymmetry = (B - B.transpose()).cwiseAbs().maxCoeff();
  r.max_g_asymmetry = (G - G.transpose()).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Mat> esB(B);
  Eigen::SelfAdjointEigenSolver<Mat> esG(G);
  if (esB.info() != Eigen::Success || esG.info() != Eigen::Success) {
    r.detail = "eigendecomposition failed";
    return r;
  }
  r.b_eigenvalues = esB.eigenvalues();
  r.g_min_eigenvalue = esG.eigenvalues()[0];
  const double lambda_max = r.b_eigenvalues[model.dim - 1];
  const double threshold = kRankTolerance * std::max(lambda_max, 0.0);
  for (int i = 0; i < model.dim; ++i)
    if (r.b_eigenvalues[i] > threshold) ++r.b_rank;

  bool ok = true;
  const double b_scale = 1.0 + B.cwiseAbs().maxCoeff();
  const double g_scale = 1.0 + G.cwiseAbs().maxCoeff();
  if (r.max_b_asymmetry > 1e-10 * b_scale) {
    ok = false;
    why << "cometric asymmetry " << r.max_b_asymmetry << "; ";
  }
  if (r.max_g_asymmetry > 1e-10 * g_scale) {
    ok = false;
    why << "metric asymmetry " << r.max_g_asymmetry << "; ";
  }
  if (r.b_eigenvalues[0] < -threshold) {
    ok = false;
    why << "cometric not PSD (min eigenvalue " << r.b_eigenvalues[0] << "); ";
  }
  if (r.b_rank != model.rank) {
    ok = false;
    why << "cometric rank " << r.b_rank << " != declared " << model.rank << "; ";
  }
  if (r.g_min_eigenvalue <= 0.0) {
    ok = false;
    why << "metric not positive definite (min eigenvalue " << r.g_min_eigenvalue
        << "); ";
  }

  if (ok) {
    // Basis of the horizontal space from the top eigenpairs; check both
    // B G c = c and that the frame is G-orthonormal.
    const int m = model.rank;
    for (int j = 0; j < m; ++j) {
      const int col = model.dim - m + j;
      const Vec c =
          esB.eigenvectors().col(col) * std::sqrt(r.b_eigenvalues[col]);
      const double res = (B * (G * c) - c).cwiseAbs().maxCoeff() /
                         std::max(1.0, c.cwiseAbs().maxCoeff());
      r.max_compat_residual = std::max(r.max_compat_residual, res);
    }
    Mat C(model.dim, m);
    for (int j = 0; j < m; ++j) {
      const int col = model.dim - m + j;
      C.col(j) = esB.eigenvectors().col(col) * std::sqrt(r.b_eigenvalues[col]);
    }
    r.max_frame_residual =
        (C.transpose() * G * C - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
    if (r.max_compat_residual > tol) {
      ok = false;
      why << "B G v = v fails on horizontal space (residual "
          << r.max_compat_residual << " > " << tol << "); ";
    }
    if (r.max_frame_residual > tol) {
      ok = false;
      why << "horizontal frame not G-orthonormal (residual "
          << r.max_frame_residual << "); ";
    }
  }

  r.pass = ok;
  r.detail = why.str();
  return r;
}

}  // namespace subriem::geometry
