#pragma once

#include <string>
#include <vector>

#include "subriem/expr.hpp"
#include "subriem/model.hpp"

namespace subriem::manifolds {

// Heisenberg group H^1 in exponential coordinates (x, y, z): horizontal
// frame X = d_x - (y/2) d_z, Y = d_y + (x/2) d_z, cometric B = X X^T + Y Y^T,
// and the one-parameter family of compatible Riemannian metrics G_lambda
// (lambda > 0 scales the vertical direction).  Includes analytic cometric
// derivatives and the closed-form Hamiltonian flow.
ManifoldModel heisenberg_model(double lambda = 1.0);

// Flat R^d with B = G = I; trajectories are straight lines.
ManifoldModel euclidean_model(int dim);

// Closed-form Hamilton-Jacobi flow on the Heisenberg model: the planar
// projection moves on the circle of the rotation rate theta = p_z, and z
// accumulates the signed swept area.  Uses a series branch for
// |theta| * T < kHeisenbergSeriesThreshold where the trigonometric
// expressions lose precision.
inline constexpr double kHeisenbergSeriesThreshold = 1e-6;
PhaseState heisenberg_flow_exact(const PhaseState& s, double T);

// ---------------------------------------------------------------------------
// Model spec files
//
// Line-oriented text format ('#' starts a comment):
//   name <identifier>
//   dim <d>
//   rank <m>
//   beta <i> <j> = <expression>     1-based upper-triangle entry of B
//   g <i> <j> = <expression>        1-based upper-triangle entry of G
//   sample <x1> ... <xd>            validation point (at least one required)
// Expressions use variables x1..xd.  Omitted entries are zero.  dim and rank
// must appear before any entry or sample line.

struct SpecParseError : std::runtime_error {
  SpecParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

// A loaded model failed structural validation at a sample point.
struct ModelValidationError : ModelError {
  explicit ModelValidationError(const std::string& what) : ModelError(what) {}
};

struct ModelSpec {
  std::string name;
  int dim = 0;
  int rank = 0;
  std::vector<expr::Expr> beta;  // dim*dim, row-major, symmetric
  std::vector<expr::Expr> g;
  std::vector<Vec> samples;
};

ModelSpec parse_model_spec(const std::string& text);

// Builds evaluators from a parsed spec; cometric derivatives are symbolic
// (expr::diff of every entry).
ManifoldModel model_from_spec(const ModelSpec& spec);

// parse + build + validate.  Validation checks, at every sample point:
// B symmetric PSD with rank exactly m, G SPD, and B G v = v on the
// horizontal space to within kLoaderCompatTol.  Failure throws
// ModelValidationError naming the sample point.
inline constexpr double kLoaderCompatTol = 1e-8;
ManifoldModel load_model(const std::string& text);
ManifoldModel load_model_file(const std::string& path);

// The Heisenberg model written in the spec format (lambda = 1); used by
// round-trip tests and as a template for user-defined models.
std::string heisenberg_spec_text();

}  // namespace subriem::manifolds
