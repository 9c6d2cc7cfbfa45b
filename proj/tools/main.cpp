// subriem: sub-Riemannian Hamiltonian random walks and the horizontal
// sub-Laplacian.  Subcommands: verify, laplacian, flow, walk, converge,
// oracle.  Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 runtime/model error.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "subriem/io.hpp"
#include "subriem/manifolds.hpp"
#include "subriem/sublaplacian.hpp"
#include "subriem/version.hpp"

namespace {

using namespace subriem;
using io::fmt;
using io::json;

int g_exit_code = 0;

// --------------------------- option helpers --------------------------------

struct ModelOptions {
  std::string model;       // heisenberg | euclidean
  std::string model_file;  // spec file path (overrides --model)
  double lambda = 1.0;     // heisenberg metric parameter
  int dim = 3;             // euclidean dimension
};

void add_model_options(CLI::App* cmd, ModelOptions& opt) {
  cmd->add_option("--model", opt.model,
                  "built-in model: heisenberg | euclidean");
  cmd->add_option("--model-file", opt.model_file,
                  "model spec file (see README for the format)");
  cmd->add_option("--lambda", opt.lambda,
                  "heisenberg metric parameter (default 1)");
  cmd->add_option("--dim", opt.dim, "euclidean dimension (default 3)");
}

ManifoldModel resolve_model(const ModelOptions& opt) {
  if (!opt.model_file.empty()) return manifolds::load_model_file(opt.model_file);
  if (opt.model == "heisenberg") return manifolds::heisenberg_model(opt.lambda);
  if (opt.model == "euclidean") return manifolds::euclidean_model(opt.dim);
  throw CLI::ValidationError(
      "--model", opt.model.empty()
                     ? "one of --model or --model-file is required"
                     : "unknown model '" + opt.model +
                           "' (use heisenberg, euclidean, or --model-file)");
}

json model_config(const ModelOptions& opt, const ManifoldModel& model) {
  json c;
  c["model"] = model.name;
  if (!opt.model_file.empty()) c["model_file"] = opt.model_file;
  if (opt.model == "heisenberg") c["lambda"] = opt.lambda;
  c["dim"] = model.dim;
  c["rank"] = model.rank;
  return c;
}

struct FieldOptions {
  std::string name;  // registry name
  std::string expr;  // inline expression (finite-difference derivatives)
};

void add_field_options(CLI::App* cmd, FieldOptions& opt) {
  cmd->add_option("--f", opt.name, "observable from the registry "
                                   "(x y z x2 y2 z2 xy xz yz r2)");
  cmd->add_option("--f-expr", opt.expr,
                  "observable as an expression in x1..xd");
}

ScalarField resolve_field(const FieldOptions& opt, int dim) {
  if (!opt.expr.empty() && !opt.name.empty())
    throw CLI::ValidationError("--f", "give either --f or --f-expr, not both");
  if (!opt.expr.empty())
    return field_from_expression(expr::parse(opt.expr, dim), dim, opt.expr,
                                 /*symbolic_derivatives=*/false);
  if (!opt.name.empty()) return registry_field(opt.name, dim);
  throw CLI::ValidationError("--f", "an observable is required (--f or --f-expr)");
}

Vec parse_vector(const std::string& text, int dim, const char* flag) {
  if (text.empty()) return Vec::Zero(dim);  // flags default to the origin
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
        ++used;
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "cannot parse component '" + item + "'");
    }
  }
  if (static_cast<int>(vals.size()) != dim)
    throw CLI::ValidationError(
        flag, "expected " + std::to_string(dim) + " comma-separated values, got " +
                  std::to_string(vals.size()));
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = vals[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "cannot parse '" + item + "'");
    }
  }
  if (vals.empty()) throw CLI::ValidationError(flag, "empty list");
  return vals;
}

walker::LegIntegrator parse_integrator(const std::string& name) {
  if (name == "auto") return walker::LegIntegrator::Auto;
  if (name == "rk4") return walker::LegIntegrator::Rk4;
  if (name == "exact") return walker::LegIntegrator::Exact;
  throw CLI::ValidationError("--integrator", "use auto, rk4, or exact");
}

void emit(const std::string& out_path, const std::string& format,
          const json& as_json, const std::string& as_csv) {
  if (out_path.empty()) return;
  if (format == "json")
    io::write_file(out_path, as_json.dump(2) + "\n");
  else if (format == "csv")
    io::write_file(out_path, as_csv);
  else
    throw CLI::ValidationError("--format", "use csv or json");
  std::cout << "wrote " << out_path << "\n";
}

// ------------------------------- verify ------------------------------------

struct VerifyCheck {
  std::string name;
  double max_value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

void cmd_verify(const ModelOptions& mopt, int n_points, std::uint64_t seed,
                const std::string& out, const std::string& format) {
  const ManifoldModel model = resolve_model(mopt);
  std::vector<VerifyCheck> checks;
  RngStream rng(seed, 0);

  // Points: random box for built-ins, declared samples for loaded models.
  std::vector<Vec> points;
  if (!mopt.model_file.empty()) {
    const manifolds::ModelSpec spec = manifolds::parse_model_spec(
        [&] {
          std::ifstream in(mopt.model_file);
          std::ostringstream buf;
          buf << in.rdbuf();
          return buf.str();
        }());
    points = spec.samples;
  } else {
    points.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
      Vec q(model.dim);
      for (int k = 0; k < model.dim; ++k) q[k] = -2.0 + 4.0 * rng.uniform();
      points.push_back(std::move(q));
    }
  }

  {
    VerifyCheck c{"compatibility (B G v = v, rank, G SPD)", 0.0, 1e-9, true};
    for (const Vec& q : points) {
      const auto rep = geometry::validate_compatibility(model, q, c.tolerance);
      c.max_value = std::max(
          c.max_value, std::max(rep.max_compat_residual, rep.max_frame_residual));
      if (!rep.pass) c.pass = false;
    }
    checks.push_back(c);
  }

  if (model.name == "heisenberg" && mopt.model_file.empty()) {
    {
      VerifyCheck c{"GBG = diag(1,1,0)", 0.0, 1e-12, true};
      Mat D = Mat::Zero(3, 3);
      D(0, 0) = 1.0;
      D(1, 1) = 1.0;
      for (const Vec& q : points) {
        const Mat B = geometry::cometric_eval(model, q);
        const Mat G = geometry::metric_eval(model, q);
        c.max_value =
            std::max(c.max_value, (G * B * G - D).cwiseAbs().maxCoeff());
      }
      c.pass = c.max_value <= c.tolerance;
      checks.push_back(c);
    }
    {
      VerifyCheck c{"Gamma^{11k} = Gamma^{22k} = Gamma^{12k} = 0", 0.0, 1e-10,
                    true};
      for (const Vec& q : points) {
        const Tensor3 g = hamiltonian::raised_christoffel(model, q);
        for (int k = 0; k < 3; ++k) {
          c.max_value = std::max({c.max_value, std::abs(g(0, 0, k)),
                                  std::abs(g(1, 1, k)), std::abs(g(0, 1, k))});
        }
      }
      c.pass = c.max_value <= c.tolerance;
      checks.push_back(c);
    }
    {
      VerifyCheck c{"sub-Laplacian independent of lambda (1 vs 7)", 0.0, 1e-10,
                    true};
      const ManifoldModel m1 = manifolds::heisenberg_model(1.0);
      const ManifoldModel m7 = manifolds::heisenberg_model(7.0);
      const auto suite = polynomial_test_suite(3);
      for (const Vec& q : points)
        for (const auto& f : suite) {
          const double a = sublaplacian::sublaplacian_local(m1, f, q);
          const double b = sublaplacian::sublaplacian_local(m7, f, q);
          c.max_value = std::max(c.max_value, std::abs(a - b));
        }
      c.pass = c.max_value <= c.tolerance;
      checks.push_back(c);
    }
  }

  if (model.name == "euclidean" && mopt.model_file.empty()) {
    VerifyCheck c{"sub-Laplacian = (1/d) Laplacian", 0.0, 1e-10, true};
    const auto suite = polynomial_test_suite(model.dim);
    for (const Vec& q : points)
      for (const auto& f : suite) {
        const double a = sublaplacian::sublaplacian_local(model, f, q);
        const double b = f.hessian(q).trace() / static_cast<double>(model.dim);
        c.max_value = std::max(c.max_value, std::abs(a - b));
      }
    c.pass = c.max_value <= c.tolerance;
    checks.push_back(c);
  }

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": max "
              << fmt(c.max_value) << " vs tolerance " << fmt(c.tolerance)
              << "\n";
    all = all && c.pass;
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES\n");

  json config;
  config["command"] = "verify";
  config["model_options"] = model_config(mopt, model);
  config["n_points"] = static_cast<long>(points.size());
  config["seed"] = seed;
  json j;
  j["kind"] = "verify_report";
  j["version"] = kVersion;
  j["config"] = config;
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back(json{{"name", c.name},
                       {"max_value", c.max_value},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
  j["checks"] = arr;
  j["pass"] = all;
  std::ostringstream csv;
  csv << io::csv_preamble(config) << "check,max_value,tolerance,pass\n";
  for (const auto& c : checks)
    csv << '"' << c.name << "\"," << fmt(c.max_value) << ',' << fmt(c.tolerance)
        << ',' << (c.pass ? 1 : 0) << "\n";
  emit(out, format, j, csv.str());

  if (!all) g_exit_code = 1;
}

// ------------------------------ laplacian -----------------------------------

void cmd_laplacian(const ModelOptions& mopt, const FieldOptions& fopt,
                   const std::string& point, long n_samples, std::uint64_t seed,
                   const std::string& out, const std::string& format) {
  const ManifoldModel model = resolve_model(mopt);
  const ScalarField f = resolve_field(fopt, model.dim);
  const Vec q = parse_vector(point, model.dim, "--point");
  const double local = sublaplacian::sublaplacian_local(model, f, q);
  RngStream rng(seed, 0);
  const auto avg = sublaplacian::sublaplacian_sphere_avg(model, f, q, n_samples, rng);
  const double diff = std::abs(avg.mean - local);
  const double sigma = avg.stderr_ > 0.0 ? diff / avg.stderr_
                                         : (diff == 0.0 ? 0.0 : INFINITY);
  std::cout << "local formula    : " << fmt(local) << "\n";
  std::cout << "sphere average   : " << fmt(avg.mean) << " +/- "
            << fmt(avg.stderr_) << "  (n = " << avg.n << ")\n";
  std::cout << "difference       : " << fmt(diff) << "  (" << fmt(sigma)
            << " stderr)\n";

  json config;
  config["command"] = "laplacian";
  config["model_options"] = model_config(mopt, model);
  config["field"] = f.name;
  config["point"] = io::to_json(q);
  config["n_samples"] = n_samples;
  config["seed"] = seed;
  json j;
  j["kind"] = "laplacian_report";
  j["version"] = kVersion;
  j["config"] = config;
  j["local"] = local;
  j["sphere_avg"] = avg.mean;
  j["sphere_stderr"] = avg.stderr_;
  j["abs_difference"] = diff;
  j["sigma_distance"] = sigma;
  std::ostringstream csv;
  csv << io::csv_preamble(config)
      << "local,sphere_avg,sphere_stderr,abs_difference,sigma_distance\n"
      << fmt(local) << ',' << fmt(avg.mean) << ',' << fmt(avg.stderr_) << ','
      << fmt(diff) << ',' << fmt(sigma) << "\n";
  emit(out, format, j, csv.str());
}

// -------------------------------- flow --------------------------------------

void cmd_flow(const ModelOptions& mopt, const std::string& point,
              const std::string& momentum, double T, double step,
              bool compare_exact, const std::string& out) {
  const ManifoldModel model = resolve_model(mopt);
  PhaseState s;
  s.q = parse_vector(point, model.dim, "--point");
  s.p = momentum.empty() ? Vec(Vec::Unit(model.dim, 0))
                         : parse_vector(momentum, model.dim, "--momentum");
  const auto res = hamiltonian::flow(model, s, T, step, /*record=*/true);
  std::cout << "final q: ";
  for (int i = 0; i < model.dim; ++i)
    std::cout << (i ? "," : "") << fmt(res.state.q[i]);
  std::cout << "\nfinal p: ";
  for (int i = 0; i < model.dim; ++i)
    std::cout << (i ? "," : "") << fmt(res.state.p[i]);
  std::cout << "\nenergy drift: " << fmt(res.energy_drift) << "\n";

  if (compare_exact) {
    if (!model.has_exact_flow())
      throw std::invalid_argument("--compare-exact: model has no exact flow");
    double sup = 0.0;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
      const PhaseState ex = model.exact_flow(s, res.times[i]);
      sup = std::max(sup,
                     (ex.q - res.trace[i].q).cwiseAbs().maxCoeff());
    }
    std::cout << "sup |q_rk4 - q_exact| over trace: " << fmt(sup) << "\n";
  }

  if (!out.empty()) {
    json config;
    config["command"] = "flow";
    config["model_options"] = model_config(mopt, model);
    config["point"] = io::to_json(s.q);
    config["momentum"] = io::to_json(s.p);
    config["t"] = T;
    config["step"] = step;
    std::ostringstream csv;
    csv << io::csv_preamble(config) << "t";
    for (int i = 0; i < model.dim; ++i) csv << ",q" << (i + 1);
    for (int i = 0; i < model.dim; ++i) csv << ",p" << (i + 1);
    csv << ",energy\n";
    for (std::size_t i = 0; i < res.times.size(); ++i) {
      csv << fmt(res.times[i]);
      for (int k = 0; k < model.dim; ++k) csv << ',' << fmt(res.trace[i].q[k]);
      for (int k = 0; k < model.dim; ++k) csv << ',' << fmt(res.trace[i].p[k]);
      csv << ',' << fmt(hamiltonian::energy(model, res.trace[i])) << "\n";
    }
    io::write_file(out, csv.str());
    std::cout << "wrote " << out << "\n";
  }
}

// -------------------------------- walk --------------------------------------

void cmd_walk(const ModelOptions& mopt, const std::string& point, double epsilon,
              double horizon, long n_paths, double step,
              const std::string& integrator, std::uint64_t seed,
              const std::string& out) {
  const ManifoldModel model = resolve_model(mopt);
  const Vec x0 = parse_vector(point, model.dim, "--point");
  walker::WalkConfig cfg;
  cfg.epsilon = epsilon;
  cfg.horizon = horizon;
  cfg.step = step;
  cfg.integrator = parse_integrator(integrator);
  std::cout << "walk: epsilon = " << fmt(epsilon) << ", horizon = "
            << fmt(horizon) << " (diffusion time " << fmt(epsilon * epsilon * horizon)
            << "), integrator = " << walker::resolved_integrator(model, cfg)
            << "\n";

  std::ostringstream csv;
  json config;
  config["command"] = "walk";
  config["model_options"] = model_config(mopt, model);
  config["x0"] = io::to_json(x0);
  config["epsilon"] = epsilon;
  config["horizon"] = horizon;
  config["step"] = step;
  config["integrator"] = walker::resolved_integrator(model, cfg);
  config["n_paths"] = n_paths;
  config["seed"] = seed;
  csv << io::csv_preamble(config) << "path,leg,tau";
  for (int i = 0; i < model.dim; ++i) csv << ",q" << (i + 1);
  for (int i = 0; i < model.dim; ++i) csv << ",p" << (i + 1);
  csv << "\n";

  for (long pth = 0; pth < n_paths; ++pth) {
    RngStream rng(seed, static_cast<std::uint64_t>(pth));
    const walker::WalkPath wp = walker::sample_walk(model, x0, cfg, rng);
    for (std::size_t leg = 0; leg < wp.jump_times.size(); ++leg) {
      csv << pth << ',' << leg << ',' << fmt(wp.jump_times[leg]);
      for (int k = 0; k < model.dim; ++k)
        csv << ',' << fmt(wp.leg_states[leg].q[k]);
      for (int k = 0; k < model.dim; ++k)
        csv << ',' << fmt(wp.leg_states[leg].p[k]);
      csv << "\n";
    }
    csv << pth << ",final," << fmt(horizon);
    for (int k = 0; k < model.dim; ++k) csv << ',' << fmt(wp.final_state.q[k]);
    for (int k = 0; k < model.dim; ++k) csv << ',' << fmt(wp.final_state.p[k]);
    csv << "\n";
    std::cout << "path " << pth << ": " << wp.jump_times.size()
              << " legs, final q = (";
    for (int k = 0; k < model.dim; ++k)
      std::cout << (k ? "," : "") << fmt(wp.final_state.q[k]);
    std::cout << "), max energy drift " << fmt(wp.max_energy_drift) << "\n";
  }
  if (!out.empty()) {
    io::write_file(out, csv.str());
    std::cout << "wrote " << out << "\n";
  }
}

// ------------------------------ converge ------------------------------------

void cmd_converge(const ModelOptions& mopt, const FieldOptions& fopt,
                  const std::string& point, double t, const std::string& eps_list,
                  long n_paths, std::uint64_t seed, int workers, double step,
                  const std::string& integrator, double user_reference,
                  bool has_user_reference, const std::string& out,
                  const std::string& format) {
  const ManifoldModel model = resolve_model(mopt);
  const ScalarField f = resolve_field(fopt, model.dim);
  const Vec x0 = parse_vector(point, model.dim, "--point");
  const std::vector<double> epsilons = parse_double_list(eps_list, "--eps-list");

  montecarlo::EstimatorConfig base;
  base.t = t;
  base.n_paths = n_paths;
  base.seed = seed;
  base.workers = workers;
  base.step = step;
  base.integrator = parse_integrator(integrator);

  montecarlo::Reference ref;
  if (has_user_reference) {
    ref.has = true;
    ref.value = user_reference;
    ref.provenance = "user";
  } else {
    ref = montecarlo::analytic_reference(model.name, model.dim, f.name, x0, t);
  }

  const auto table = montecarlo::convergence_sweep(model, f, x0, epsilons, base, ref);
  if (table.reference.has)
    std::cout << "reference: " << fmt(table.reference.value) << " ("
              << table.reference.provenance << ")\n";
  std::cout << "epsilon   estimate      stderr        |deviation|\n";
  for (const auto& r : table.rows) {
    std::cout << fmt(r.epsilon) << "  " << fmt(r.estimate) << "  "
              << fmt(r.stderr_);
    if (table.reference.has)
      std::cout << "  " << fmt(std::abs(r.estimate - table.reference.value));
    std::cout << "\n";
  }
  emit(out, format, io::to_json(table), io::to_csv(table));
}

// ------------------------------- oracle -------------------------------------

void cmd_oracle(double t, long n_paths, double dt, std::uint64_t seed,
                int workers, const std::string& out, const std::string& format) {
  montecarlo::SdeOracleConfig cfg;
  cfg.t = t;
  cfg.n_paths = n_paths;
  cfg.dt = dt;
  cfg.seed = seed;
  cfg.workers = workers;
  const auto rep = montecarlo::heisenberg_sde_oracle(cfg);
  auto line = [](const char* name, const montecarlo::MomentStat& s) {
    std::cout << name << ": " << fmt(s.value) << " +/- " << fmt(s.stderr_)
              << "\n";
  };
  std::cout << "heisenberg SDE oracle (Euler-Maruyama, t = " << fmt(rep.t)
            << ", dt = " << fmt(rep.dt) << ", n = " << rep.n_paths << ")\n";
  line("E[x]  ", rep.ex);
  line("E[y]  ", rep.ey);
  line("E[z]  ", rep.ez);
  line("E[x^2]", rep.ex2);
  line("E[y^2]", rep.ey2);
  line("E[z^2]", rep.ez2);
  line("Var[z]", rep.var_z);
  emit(out, format, io::to_json(rep), io::to_csv(rep));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Riemannian Hamiltonian random walks and the horizontal "
               "sub-Laplacian"};
  app.set_version_flag("--version", std::string("subriem ") + kVersion);
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "structural model checks");
  static ModelOptions v_m;
  static int v_points = 100;
  static std::uint64_t v_seed = 0;
  static std::string v_out, v_format = "json";
  add_model_options(verify, v_m);
  verify->add_option("--n-points", v_points, "number of random check points");
  verify->add_option("--seed", v_seed, "RNG seed");
  verify->add_option("--out", v_out, "output file");
  verify->add_option("--format", v_format, "csv | json (default json)");
  verify->callback(
      [] { cmd_verify(v_m, v_points, v_seed, v_out, v_format); });

  // laplacian
  auto* lap = app.add_subcommand(
      "laplacian", "sub-Laplacian of an observable: local formula vs sphere "
                   "average along the flow");
  static ModelOptions l_m;
  static FieldOptions l_f;
  static std::string l_point;
  static long l_samples = 100000;
  static std::uint64_t l_seed = 0;
  static std::string l_out, l_format = "json";
  add_model_options(lap, l_m);
  add_field_options(lap, l_f);
  lap->add_option("--point", l_point, "base point, comma-separated (default origin)");
  lap->add_option("--n-samples", l_samples, "Monte Carlo directions");
  lap->add_option("--seed", l_seed, "RNG seed");
  lap->add_option("--out", l_out, "output file");
  lap->add_option("--format", l_format, "csv | json (default json)");
  lap->callback([] {
    cmd_laplacian(l_m, l_f, l_point, l_samples, l_seed, l_out, l_format);
  });

  // flow
  auto* flow = app.add_subcommand("flow", "integrate the Hamiltonian flow");
  static ModelOptions f_m;
  static std::string f_point, f_mom;
  static double f_t = 1.0, f_step = hamiltonian::kDefaultStep;
  static bool f_exact = false;
  static std::string f_out;
  add_model_options(flow, f_m);
  flow->add_option("--point", f_point, "initial position (default origin)");
  flow->add_option("--momentum", f_mom,
                   "initial momentum (default first coordinate direction)");
  flow->add_option("--t", f_t, "integration time");
  flow->add_option("--step", f_step, "RK4 step");
  flow->add_flag("--compare-exact", f_exact,
                 "compare against the model's closed-form flow");
  flow->add_option("--out", f_out, "trace CSV file");
  flow->callback(
      [] { cmd_flow(f_m, f_point, f_mom, f_t, f_step, f_exact, f_out); });

  // walk
  auto* walk = app.add_subcommand("walk", "sample epsilon-scaled random walks");
  static ModelOptions w_m;
  static std::string w_point;
  static double w_eps = 0.1, w_horizon = 10.0,
                w_step = hamiltonian::kDefaultStep;
  static long w_paths = 1;
  static std::string w_integrator = "auto";
  static std::uint64_t w_seed = 0;
  static std::string w_out;
  add_model_options(walk, w_m);
  walk->add_option("--point", w_point, "start position (default origin)");
  walk->add_option("--epsilon", w_eps, "walk scale");
  walk->add_option("--horizon", w_horizon,
                   "walk-clock end time (diffusion time = epsilon^2 * horizon)");
  walk->add_option("--n-paths", w_paths, "number of independent walks");
  walk->add_option("--step", w_step, "RK4 step bound");
  walk->add_option("--integrator", w_integrator, "auto | rk4 | exact");
  walk->add_option("--seed", w_seed, "RNG seed");
  walk->add_option("--out", w_out, "legs CSV file");
  walk->callback([] {
    cmd_walk(w_m, w_point, w_eps, w_horizon, w_paths, w_step, w_integrator,
             w_seed, w_out);
  });

  // converge
  auto* conv = app.add_subcommand(
      "converge", "semigroup estimates across an epsilon sweep");
  static ModelOptions c_m;
  static FieldOptions c_f;
  static std::string c_point, c_eps = "0.2,0.1,0.05";
  static double c_t = 1.0, c_step = hamiltonian::kDefaultStep;
  static long c_paths = 10000;
  static std::uint64_t c_seed = 0;
  static int c_workers = 1;
  static std::string c_integrator = "auto";
  static double c_ref = 0.0;
  static std::string c_out, c_format = "json";
  add_model_options(conv, c_m);
  add_field_options(conv, c_f);
  conv->add_option("--point", c_point, "start position (default origin)");
  conv->add_option("--t", c_t, "diffusion time");
  conv->add_option("--eps-list", c_eps, "comma-separated epsilon values");
  conv->add_option("--n-paths", c_paths, "paths per epsilon");
  conv->add_option("--seed", c_seed, "RNG seed");
  conv->add_option("--workers", c_workers, "worker threads");
  conv->add_option("--step", c_step, "RK4 step bound");
  conv->add_option("--integrator", c_integrator, "auto | rk4 | exact");
  auto* ref_opt =
      conv->add_option("--reference", c_ref, "supply a reference value");
  conv->add_option("--out", c_out, "output file");
  conv->add_option("--format", c_format, "csv | json (default json)");
  conv->callback([ref_opt] {
    cmd_converge(c_m, c_f, c_point, c_t, c_eps, c_paths, c_seed, c_workers,
                 c_step, c_integrator, c_ref, ref_opt->count() > 0, c_out,
                 c_format);
  });

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "independent SDE reference moments (heisenberg, origin)");
  static double o_t = 1.0, o_dt = 1e-3;
  static long o_paths = 100000;
  static std::uint64_t o_seed = 0;
  static int o_workers = 1;
  static std::string o_out, o_format = "json";
  oracle->add_option("--t", o_t, "diffusion time");
  oracle->add_option("--n-paths", o_paths, "number of paths");
  oracle->add_option("--dt", o_dt, "Euler-Maruyama step");
  oracle->add_option("--seed", o_seed, "RNG seed");
  oracle->add_option("--workers", o_workers, "worker threads");
  oracle->add_option("--out", o_out, "output file");
  oracle->add_option("--format", o_format, "csv | json (default json)");
  oracle->callback(
      [] { cmd_oracle(o_t, o_paths, o_dt, o_seed, o_workers, o_out, o_format); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const expr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const manifolds::SpecParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return g_exit_code;
}
