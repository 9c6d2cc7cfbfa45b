#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subriem/fields.hpp"
#include "subriem/model.hpp"
#include "subriem/walker.hpp"

namespace subriem::montecarlo {

// More than this fraction of failed paths aborts the estimate instead of
// silently reporting a biased value.
inline constexpr double kMaxFailedFraction = 1e-3;

struct EstimateError : std::runtime_error {
  explicit EstimateError(const std::string& what) : std::runtime_error(what) {}
};

struct EstimatorConfig {
  double epsilon = 0.1;
  double t = 1.0;  // diffusion time; walk horizon is t / epsilon^2
  long n_paths = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  double step = hamiltonian::kDefaultStep;
  walker::LegIntegrator integrator = walker::LegIntegrator::Auto;
};

// Monte Carlo estimate of E[f(X^eps at diffusion time t)] started at x0.
// Paths use RNG substream (seed, path index) and are reduced by pairwise
// summation in index order, so `workers` never changes any numeric output.
struct EstimatorReport {
  std::string model, field;
  Vec x0;
  double epsilon = 0.0, t = 0.0, horizon = 0.0;
  long n_paths = 0, failed_paths = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  double step = 0.0;
  std::string integrator;         // resolved: "exact" or "rk4"
  double estimate = 0.0, stderr_ = 0.0;
  std::string first_error;        // message of the lowest-index failed path
  double elapsed_seconds = 0.0;   // informational; not part of the payload
};

EstimatorReport estimate_semigroup(const ManifoldModel& model,
                                   const ScalarField& f, const Vec& x0,
                                   const EstimatorConfig& cfg);

// Reference value that the sweep deviations are measured against.
struct Reference {
  bool has = false;
  double value = 0.0;
  double stderr_ = 0.0;  // 0 for closed-form references
  std::string provenance = "none";
};

// Closed-form semigroup values for the built-in models and registry fields
// (horizontal Brownian motion moments on the Heisenberg group; coordinate
// Brownian motion with generator (1/d) Laplacian on R^d).  has = false when
// no formula applies.
Reference analytic_reference(const std::string& model_name, int dim,
                             const std::string& field_name, const Vec& x0,
                             double t);

struct ConvergenceRow {
  double epsilon = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  long n_paths = 0, failed_paths = 0;
};

struct ConvergenceTable {
  std::string model, field;
  Vec x0;
  double t = 0.0;
  long n_paths = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  double step = 0.0;
  std::string integrator;  // resolved: "exact" or "rk4"
  std::vector<ConvergenceRow> rows;  // in the order the epsilons were given
  Reference reference;
};

// One estimate per epsilon, same seed (common random numbers across rows).
ConvergenceTable convergence_sweep(const ManifoldModel& model,
                                   const ScalarField& f, const Vec& x0,
                                   std::span<const double> epsilons,
                                   const EstimatorConfig& base,
                                   const Reference& reference);

// ---------------------------------------------------------------------------
// Independent reference: Euler-Maruyama simulation of horizontal Brownian
// motion on the Heisenberg group started at the origin,
//   dx = dW1, dy = dW2, dz = (x dW2 - y dW1) / 2,
// which shares no code with the walker (no flows, no redirects).

struct SdeOracleConfig {
  double t = 1.0;
  long n_paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct MomentStat {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct SdeMomentReport {
  double t = 0.0;
  long n_paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  int workers = 1;
  MomentStat ex, ey, ez;     // first moments
  MomentStat ex2, ey2, ez2;  // raw second moments
  MomentStat var_z;          // unbiased variance of z with its own stderr
  double elapsed_seconds = 0.0;
};

SdeMomentReport heisenberg_sde_oracle(const SdeOracleConfig& cfg);

// Summary statistics of a sample; the variance stderr uses the fourth
// central moment: se(s^2) = sqrt((m4 - s^4 (n-3)/(n-1)) / n).
struct MomentReport {
  long n = 0;
  double mean = 0.0, stderr_mean = 0.0;
  double variance = 0.0, stderr_variance = 0.0;
  double min = 0.0, max = 0.0;
};

MomentReport moment_report(std::span<const double> xs);

}  // namespace subriem::montecarlo
