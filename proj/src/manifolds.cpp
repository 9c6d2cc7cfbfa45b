#include "subriem/manifolds.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "subriem/geometry.hpp"

namespace subriem::manifolds {

ManifoldModel heisenberg_model(double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("heisenberg_model: lambda must be > 0");
  ManifoldModel m;
  m.name = "heisenberg";
  m.dim = 3;
  m.rank = 2;
  m.cometric = [](const Vec& q, Mat& B) {
    const double x = q[0], y = q[1];
    B(0, 0) = 1.0;
    B(0, 1) = 0.0;
    B(0, 2) = -0.5 * y;
    B(1, 0) = 0.0;
    B(1, 1) = 1.0;
    B(1, 2) = 0.5 * x;
    B(2, 0) = -0.5 * y;
    B(2, 1) = 0.5 * x;
    B(2, 2) = 0.25 * (x * x + y * y);
  };
  m.metric = [lambda](const Vec& q, Mat& G) {
    const double x = q[0], y = q[1];
    G(0, 0) = 1.0 + 0.25 * lambda * y * y;
    G(0, 1) = -0.25 * lambda * x * y;
    G(0, 2) = 0.5 * lambda * y;
    G(1, 0) = G(0, 1);
    G(1, 1) = 1.0 + 0.25 * lambda * x * x;
    G(1, 2) = -0.5 * lambda * x;
    G(2, 0) = G(0, 2);
    G(2, 1) = G(1, 2);
    G(2, 2) = lambda;
  };
  m.cometric_derivatives = [](const Vec& q, Tensor3& dB) {
    const double x = q[0], y = q[1];
    dB.set_zero();
    // d/dx: entries (1,2) and (2,2); d/dy: entries (0,2) and (2,2).
    dB(1, 2, 0) = 0.5;
    dB(2, 1, 0) = 0.5;
    dB(2, 2, 0) = 0.5 * x;
    dB(0, 2, 1) = -0.5;
    dB(2, 0, 1) = -0.5;
    dB(2, 2, 1) = 0.5 * y;
  };
  m.exact_flow = [](const PhaseState& s, double T) {
    return heisenberg_flow_exact(s, T);
  };
  return m;
}

ManifoldModel euclidean_model(int dim) {
  if (dim < 1) throw std::invalid_argument("euclidean_model: dim must be >= 1");
  ManifoldModel m;
  m.name = "euclidean";
  m.dim = dim;
  m.rank = dim;
  m.cometric = [](const Vec& q, Mat& B) { B.setIdentity(); (void)q; };
  m.metric = [](const Vec& q, Mat& G) { G.setIdentity(); (void)q; };
  m.cometric_derivatives = [](const Vec& q, Tensor3& dB) {
    (void)q;
    dB.set_zero();
  };
  m.exact_flow = [](const PhaseState& s, double T) {
    return PhaseState{s.q + T * s.p, s.p};
  };
  return m;
}

PhaseState heisenberg_flow_exact(const PhaseState& s, double T) {
  if (s.q.size() != 3 || s.p.size() != 3)
    throw std::invalid_argument("heisenberg_flow_exact: state must have dim 3");
  const double x0 = s.q[0], y0 = s.q[1], z0 = s.q[2];
  const double theta = s.p[2];
  // Horizontal velocity components at the start: qdot = (a, b, (x b - y a)/2).
  const double a0 = s.p[0] - 0.5 * y0 * theta;
  const double b0 = s.p[1] + 0.5 * x0 * theta;

  const double w = theta * T;
  // IC = int_0^T cos(theta t) dt, IS = int_0^T sin(theta t) dt,
  // J  = (theta T - sin(theta T)) / (2 theta^2)  (area integral).
  double IC, IS, J;
  if (std::abs(w) < kHeisenbergSeriesThreshold) {
    const double w2 = w * w;
    IC = T * (1.0 - w2 / 6.0 + w2 * w2 / 120.0);
    IS = 0.5 * T * w * (1.0 - w2 / 12.0 + w2 * w2 / 360.0);
    J = T * T * (w / 12.0 - w2 * w / 240.0 + w2 * w2 * w / 10080.0);
  } else {
    const double sw = std::sin(w);
    const double half = std::sin(0.5 * w);
    IC = sw / theta;
    IS = 2.0 * half * half / theta;  // (1 - cos w)/theta without cancellation
    J = (w - sw) / (2.0 * theta * theta);
  }

  const double cw = std::cos(w), sw = std::sin(w);
  const double xi = a0 * IC - b0 * IS;   // x displacement
  const double eta = a0 * IS + b0 * IC;  // y displacement
  const double aT = a0 * cw - b0 * sw;
  const double bT = a0 * sw + b0 * cw;

  PhaseState out;
  out.q = Vec(3);
  out.p = Vec(3);
  out.q[0] = x0 + xi;
  out.q[1] = y0 + eta;
  out.q[2] = z0 + 0.5 * (x0 * eta - y0 * xi) + (a0 * a0 + b0 * b0) * J;
  out.p[0] = aT + 0.5 * out.q[1] * theta;
  out.p[1] = bT - 0.5 * out.q[0] * theta;
  out.p[2] = theta;
  return out;
}

// ---------------------------------------------------------------------------
// Spec files

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_index(const std::string& tok, int dim, int& out) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) return false;
    if (v < 1 || v > dim) return false;
    out = v - 1;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text) {
  ModelSpec spec;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool have_dim = false, have_rank = false;
  std::set<std::pair<char, std::pair<int, int>>> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;  // blank

    if (kind == "name") {
      if (!(ls >> spec.name))
        throw SpecParseError("expected identifier after 'name'", line_no);
      std::string extra;
      if (ls >> extra) throw SpecParseError("trailing tokens after name", line_no);
    } else if (kind == "dim" || kind == "rank") {
      int v = 0;
      if (!(ls >> v) || v < 1)
        throw SpecParseError("expected positive integer after '" + kind + "'",
                             line_no);
      if (kind == "dim") {
        if (have_dim) throw SpecParseError("duplicate 'dim'", line_no);
        spec.dim = v;
        have_dim = true;
      } else {
        if (have_rank) throw SpecParseError("duplicate 'rank'", line_no);
        spec.rank = v;
        have_rank = true;
      }
    } else if (kind == "beta" || kind == "g") {
      if (!have_dim)
        throw SpecParseError("'dim' must be declared before entries", line_no);
      if (spec.beta.empty()) {
        spec.beta.assign(static_cast<std::size_t>(spec.dim) * spec.dim,
                         expr::constant(0.0));
        spec.g.assign(static_cast<std::size_t>(spec.dim) * spec.dim,
                      expr::constant(0.0));
      }
      std::string si, sj;
      if (!(ls >> si >> sj))
        throw SpecParseError("expected '" + kind + " i j = <expr>'", line_no);
      int i = 0, j = 0;
      if (!parse_index(si, spec.dim, i) || !parse_index(sj, spec.dim, j))
        throw SpecParseError("entry indices must be in 1..dim", line_no);
      if (i > j)
        throw SpecParseError("entries are given in the upper triangle (i <= j)",
                             line_no);
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw SpecParseError("expected '=' in entry line", line_no);
      const std::string rhs = line.substr(eq + 1);
      expr::Expr e;
      try {
        e = expr::parse(rhs, spec.dim);
      } catch (const expr::ParseError& pe) {
        throw SpecParseError(std::string("bad expression: ") + pe.what(), line_no);
      }
      const char tag = kind == "beta" ? 'b' : 'g';
      if (!seen.insert({tag, {i, j}}).second)
        throw SpecParseError("duplicate entry " + kind + " " + si + " " + sj,
                             line_no);
      auto& grid = (kind == "beta") ? spec.beta : spec.g;
      grid[static_cast<std::size_t>(i) * spec.dim + j] = e;
      grid[static_cast<std::size_t>(j) * spec.dim + i] = e;
    } else if (kind == "sample") {
      if (!have_dim)
        throw SpecParseError("'dim' must be declared before samples", line_no);
      Vec x(spec.dim);
      for (int k = 0; k < spec.dim; ++k)
        if (!(ls >> x[k]))
          throw SpecParseError("sample needs " + std::to_string(spec.dim) +
                                   " coordinates",
                               line_no);
      std::string extra;
      if (ls >> extra)
        throw SpecParseError("sample has too many coordinates", line_no);
      spec.samples.push_back(std::move(x));
    } else {
      throw SpecParseError("unknown directive '" + kind + "'", line_no);
    }
  }

  if (!have_dim) throw SpecParseError("missing 'dim'", line_no);
  if (!have_rank) throw SpecParseError("missing 'rank'", line_no);
  if (spec.rank > spec.dim)
    throw SpecParseError("rank must satisfy 1 <= rank <= dim", line_no);
  if (spec.name.empty()) spec.name = "model";
  if (spec.beta.empty())
    throw SpecParseError("no cometric entries given", line_no);
  if (spec.samples.empty())
    throw SpecParseError("at least one 'sample' line is required", line_no);
  return spec;
}

namespace {

// Evaluators share one immutable payload: the entry expressions and their
// symbolic derivatives.
struct LoadedData {
  int dim;
  std::vector<expr::Expr> beta, g, dbeta;  // dbeta[(i*d + j)*d + l]
};

}  // namespace

ManifoldModel model_from_spec(const ModelSpec& spec) {
  auto data = std::make_shared<LoadedData>();
  const int d = spec.dim;
  data->dim = d;
  data->beta = spec.beta;
  data->g = spec.g;
  data->dbeta.resize(static_cast<std::size_t>(d) * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l)
        data->dbeta[(static_cast<std::size_t>(i) * d + j) * d + l] =
            spec.beta[static_cast<std::size_t>(i) * d + j].diff(l);

  ManifoldModel m;
  m.name = spec.name;
  m.dim = d;
  m.rank = spec.rank;
  m.cometric = [data](const Vec& q, Mat& B) {
    const int n = data->dim;
    std::span<const double> xs(q.data(), q.size());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = data->beta[static_cast<std::size_t>(i) * n + j].eval(xs);
        B(i, j) = v;
        B(j, i) = v;
      }
  };
  m.metric = [data](const Vec& q, Mat& G) {
    const int n = data->dim;
    std::span<const double> xs(q.data(), q.size());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = data->g[static_cast<std::size_t>(i) * n + j].eval(xs);
        G(i, j) = v;
        G(j, i) = v;
      }
  };
  m.cometric_derivatives = [data](const Vec& q, Tensor3& dB) {
    const int n = data->dim;
    std::span<const double> xs(q.data(), q.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          dB(i, j, l) =
              data->dbeta[(static_cast<std::size_t>(i) * n + j) * n + l].eval(xs);
  };
  return m;
}

ManifoldModel load_model(const std::string& text) {
  const ModelSpec spec = parse_model_spec(text);
  ManifoldModel m = model_from_spec(spec);
  for (const Vec& x : spec.samples) {
    geometry::CompatibilityReport r;
    try {
      r = geometry::validate_compatibility(m, x, kLoaderCompatTol);
    } catch (const std::exception& e) {
      throw ModelValidationError(std::string("model '") + m.name +
                                 "' failed to evaluate at a sample point: " +
                                 e.what());
    }
    if (!r.pass) {
      std::ostringstream msg;
      msg << "model '" << m.name << "' rejected at sample (";
      for (int k = 0; k < x.size(); ++k) msg << (k ? ", " : "") << x[k];
      msg << "): " << r.detail;
      throw ModelValidationError(msg.str());
    }
  }
  return m;
}

ManifoldModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

std::string heisenberg_spec_text() {
  return R"(# Heisenberg group H^1 (exponential coordinates), lambda = 1 metric
name heisenberg
dim 3
rank 2

beta 1 1 = 1
beta 1 3 = -x2/2
beta 2 2 = 1
beta 2 3 = x1/2
beta 3 3 = (x1^2 + x2^2)/4

g 1 1 = 1 + x2^2/4
g 1 2 = -x1*x2/4
g 1 3 = x2/2
g 2 2 = 1 + x1^2/4
g 2 3 = -x1/2
g 3 3 = 1

sample 0 0 0
sample 1 -0.5 2
sample -1.2 0.7 3.1
sample 0.3 2.1 -0.4
)";
}

}  // namespace subriem::manifolds
