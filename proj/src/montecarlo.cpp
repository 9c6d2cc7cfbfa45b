#include "subriem/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "subriem/rng.hpp"
#include "subriem/stats.hpp"

namespace subriem::montecarlo {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

EstimatorReport estimate_semigroup(const ManifoldModel& model,
                                   const ScalarField& f, const Vec& x0,
                                   const EstimatorConfig& cfg) {
  check_dim(x0, model.dim, "estimate_semigroup: x0");
  if (cfg.n_paths < 2)
    throw std::invalid_argument("estimate_semigroup: need n_paths >= 2");
  if (!(cfg.epsilon > 0.0))
    throw std::invalid_argument("estimate_semigroup: epsilon must be > 0");
  if (cfg.t < 0.0)
    throw std::invalid_argument("estimate_semigroup: t must be >= 0");
  if (f.dim != model.dim)
    throw std::invalid_argument("estimate_semigroup: field dimension " +
                                std::to_string(f.dim) + " != model dimension " +
                                std::to_string(model.dim));

  const auto t0 = std::chrono::steady_clock::now();
  walker::WalkConfig wcfg;
  wcfg.epsilon = cfg.epsilon;
  wcfg.horizon = cfg.t / (cfg.epsilon * cfg.epsilon);
  wcfg.step = cfg.step;
  wcfg.integrator = cfg.integrator;

  const long n = cfg.n_paths;
  std::vector<double> values(static_cast<std::size_t>(n), 0.0);
  std::vector<char> failed(static_cast<std::size_t>(n), 0);

  parallel_chunks(n, cfg.workers, [&](long lo, long hi) {
    walker::Scratch scratch(model.dim);
    for (long i = lo; i < hi; ++i) {
      RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
      try {
        const PhaseState fs =
            walker::final_state(model, x0, wcfg, rng, scratch);
        const double v = f.value(fs.q);
        if (std::isfinite(v))
          values[static_cast<std::size_t>(i)] = v;
        else
          failed[static_cast<std::size_t>(i)] = 1;
      } catch (const ModelError&) {
        failed[static_cast<std::size_t>(i)] = 1;
      } catch (const IntegrationError&) {
        failed[static_cast<std::size_t>(i)] = 1;
      }
    }
  });

  EstimatorReport rep;
  rep.model = model.name;
  rep.field = f.name;
  rep.x0 = x0;
  rep.epsilon = cfg.epsilon;
  rep.t = cfg.t;
  rep.horizon = wcfg.horizon;
  rep.n_paths = n;
  rep.seed = cfg.seed;
  rep.workers = cfg.workers;
  rep.step = cfg.step;
  rep.integrator = walker::resolved_integrator(model, wcfg);

  long n_failed = 0;
  for (char c : failed) n_failed += c;
  rep.failed_paths = n_failed;
  if (n_failed > 0) {
    // Re-run the lowest failed index serially so the reported message does
    // not depend on scheduling.
    long first = 0;
    while (!failed[static_cast<std::size_t>(first)]) ++first;
    walker::Scratch scratch(model.dim);
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(first));
    try {
      (void)walker::final_state(model, x0, wcfg, rng, scratch);
      rep.first_error = "non-finite observable value";
    } catch (const std::exception& e) {
      rep.first_error = e.what();
    }
  }

  if (static_cast<double>(n_failed) >
      kMaxFailedFraction * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << "estimate_semigroup: " << n_failed << " of " << n
        << " paths failed (threshold " << kMaxFailedFraction
        << "); first failure: " << rep.first_error;
    throw EstimateError(msg.str());
  }

  std::vector<double> kept;
  kept.reserve(static_cast<std::size_t>(n - n_failed));
  for (long i = 0; i < n; ++i)
    if (!failed[static_cast<std::size_t>(i)])
      kept.push_back(values[static_cast<std::size_t>(i)]);
  if (kept.size() < 2)
    throw EstimateError("estimate_semigroup: fewer than 2 surviving paths");

  const MeanStderr ms = mean_stderr(kept);
  rep.estimate = ms.mean;
  rep.stderr_ = ms.stderr_;
  rep.elapsed_seconds = elapsed_since(t0);
  return rep;
}

Reference analytic_reference(const std::string& model_name, int dim,
                             const std::string& field_name, const Vec& x0,
                             double t) {
  Reference ref;
  auto set = [&ref](double v) {
    ref.has = true;
    ref.value = v;
    ref.provenance = "analytic";
  };
  if (model_name == "heisenberg" && dim == 3) {
    const double x = x0[0], y = x0[1], z = x0[2];
    const double r2xy = x * x + y * y;
    if (field_name == "x") set(x);
    else if (field_name == "y") set(y);
    else if (field_name == "z") set(z);
    else if (field_name == "x2") set(x * x + t);
    else if (field_name == "y2") set(y * y + t);
    else if (field_name == "xy") set(x * y);
    else if (field_name == "z2") set(z * z + 0.25 * (r2xy * t + t * t));
    else if (field_name == "r2")
      set(r2xy + 2.0 * t + z * z + 0.25 * (r2xy * t + t * t));
  } else if (model_name == "euclidean") {
    const double vt = 2.0 * t / static_cast<double>(dim);
    auto coord = [&](int i) { return i < dim ? x0[i] : 0.0; };
    if (field_name == "x" && dim >= 1) set(coord(0));
    else if (field_name == "y" && dim >= 2) set(coord(1));
    else if (field_name == "z" && dim >= 3) set(coord(2));
    else if (field_name == "x2" && dim >= 1) set(coord(0) * coord(0) + vt);
    else if (field_name == "y2" && dim >= 2) set(coord(1) * coord(1) + vt);
    else if (field_name == "z2" && dim >= 3) set(coord(2) * coord(2) + vt);
    else if (field_name == "xy" && dim >= 2) set(coord(0) * coord(1));
    else if (field_name == "xz" && dim >= 3) set(coord(0) * coord(2));
    else if (field_name == "yz" && dim >= 3) set(coord(1) * coord(2));
    else if (field_name == "r2") set(x0.squaredNorm() + 2.0 * t);
  }
  return ref;
}

ConvergenceTable convergence_sweep(const ManifoldModel& model,
                                   const ScalarField& f, const Vec& x0,
                                   std::span<const double> epsilons,
                                   const EstimatorConfig& base,
                                   const Reference& reference) {
  if (epsilons.empty())
    throw std::invalid_argument("convergence_sweep: empty epsilon list");
  ConvergenceTable table;
  table.model = model.name;
  table.field = f.name;
  table.x0 = x0;
  table.t = base.t;
  table.n_paths = base.n_paths;
  table.seed = base.seed;
  table.workers = base.workers;
  table.step = base.step;
  {
    walker::WalkConfig wcfg;
    wcfg.integrator = base.integrator;
    table.integrator = walker::resolved_integrator(model, wcfg);
  }
  table.reference = reference;
  for (double eps : epsilons) {
    EstimatorConfig cfg = base;
    cfg.epsilon = eps;
    const EstimatorReport rep = estimate_semigroup(model, f, x0, cfg);
    table.rows.push_back(
        {eps, rep.estimate, rep.stderr_, rep.n_paths, rep.failed_paths});
  }
  return table;
}

SdeMomentReport heisenberg_sde_oracle(const SdeOracleConfig& cfg) {
  if (cfg.n_paths < 2)
    throw std::invalid_argument("heisenberg_sde_oracle: need n_paths >= 2");
  if (!(cfg.t > 0.0) || !(cfg.dt > 0.0))
    throw std::invalid_argument("heisenberg_sde_oracle: t and dt must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const long n_steps =
      std::max(1L, static_cast<long>(std::ceil(cfg.t / cfg.dt)));
  const double h = cfg.t / static_cast<double>(n_steps);
  const double sqh = std::sqrt(h);

  const long n = cfg.n_paths;
  std::vector<double> xs(static_cast<std::size_t>(n)),
      ys(static_cast<std::size_t>(n)), zs(static_cast<std::size_t>(n));

  parallel_chunks(n, cfg.workers, [&](long lo, long hi) {
    for (long i = lo; i < hi; ++i) {
      RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
      double x = 0.0, y = 0.0, z = 0.0;
      for (long k = 0; k < n_steps; ++k) {
        const double dw1 = sqh * rng.normal();
        const double dw2 = sqh * rng.normal();
        z += 0.5 * (x * dw2 - y * dw1);  // pre-update x, y: Ito convention
        x += dw1;
        y += dw2;
      }
      xs[static_cast<std::size_t>(i)] = x;
      ys[static_cast<std::size_t>(i)] = y;
      zs[static_cast<std::size_t>(i)] = z;
    }
  });

  SdeMomentReport rep;
  rep.t = cfg.t;
  rep.n_paths = n;
  rep.dt = h;
  rep.seed = cfg.seed;
  rep.workers = cfg.workers;

  auto raw_second = [](std::span<const double> v) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
    const MeanStderr ms = mean_stderr(sq);
    return MomentStat{ms.mean, ms.stderr_};
  };
  auto first = [](std::span<const double> v) {
    const MeanStderr ms = mean_stderr(v);
    return MomentStat{ms.mean, ms.stderr_};
  };
  rep.ex = first(xs);
  rep.ey = first(ys);
  rep.ez = first(zs);
  rep.ex2 = raw_second(xs);
  rep.ey2 = raw_second(ys);
  rep.ez2 = raw_second(zs);
  const MomentReport zrep = moment_report(zs);
  rep.var_z = {zrep.variance, zrep.stderr_variance};
  rep.elapsed_seconds = elapsed_since(t0);
  return rep;
}

MomentReport moment_report(std::span<const double> xs) {
  if (xs.size() < 4)
    throw std::invalid_argument("moment_report: need at least 4 samples");
  MomentReport r;
  r.n = static_cast<long>(xs.size());
  const double n = static_cast<double>(r.n);
  const MeanStderr ms = mean_stderr(xs);
  r.mean = ms.mean;
  r.stderr_mean = ms.stderr_;
  std::vector<double> d2(xs.size()), d4(xs.size());
  r.min = xs[0];
  r.max = xs[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - r.mean;
    d2[i] = d * d;
    d4[i] = d2[i] * d2[i];
    r.min = std::min(r.min, xs[i]);
    r.max = std::max(r.max, xs[i]);
  }
  r.variance = pairwise_sum(d2) / (n - 1.0);
  const double m4 = pairwise_sum(d4) / n;
  const double s4 = r.variance * r.variance;
  const double var_of_var = (m4 - s4 * (n - 3.0) / (n - 1.0)) / n;
  r.stderr_variance = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
  return r;
}

}  // namespace subriem::montecarlo
