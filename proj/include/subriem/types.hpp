#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace subriem {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point of the cotangent bundle: base point q together with a covector p.
struct PhaseState {
  Vec q;
  Vec p;
};

// Dense rank-3 array a(i,j,k) with all three indices running over 0..d-1.
// Used for the coordinate derivatives of the cometric, d_k beta^{ij}.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int d) { resize(d); }

  void resize(int d) {
    d_ = d;
    a_.assign(static_cast<std::size_t>(d) * d * d, 0.0);
  }
  void set_zero() { std::fill(a_.begin(), a_.end(), 0.0); }

  int dim() const { return d_; }

  double& operator()(int i, int j, int k) {
    return a_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k];
  }
  double operator()(int i, int j, int k) const {
    return a_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k];
  }

 private:
  int d_ = 0;
  std::vector<double> a_;
};

// Model evaluation produced a non-finite value or violated a structural
// requirement (symmetry, positivity) at a queried point.
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// The cometric does not have the declared rank at a queried point.
struct DegenerateRankError : ModelError {
  DegenerateRankError(const std::string& what, Vec eigenvalues)
      : ModelError(what), eigenvalues(std::move(eigenvalues)) {}
  Vec eigenvalues;
};

// A Hamiltonian trajectory left the domain where the model evaluates to
// finite values.
struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, double fail_time)
      : std::runtime_error(what), fail_time(fail_time) {}
  double fail_time;
};

inline void check_dim(const Vec& x, int d, const char* label) {
  if (x.size() != d) {
    throw std::invalid_argument(std::string(label) + ": expected dimension " +
                                std::to_string(d) + ", got " +
                                std::to_string(x.size()));
  }
}

}  // namespace subriem
