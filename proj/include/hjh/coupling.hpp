#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hjh {

// Row-stochastic switching matrix K; the generator of the fast chain is (K - I)/eps.
class CouplingMatrix {
 public:
  explicit CouplingMatrix(Eigen::MatrixXd k);
  static CouplingMatrix from_rows(const std::vector<std::vector<double>>& rows);
  // c1 = rate of leaving state 0, c2 = rate of leaving state 1.
  static CouplingMatrix two_state(double c1 = 1.0, double c2 = 1.0);
  static CouplingMatrix single();

  int m() const noexcept { return static_cast<int>(k_.rows()); }
  double operator()(int i, int j) const { return k_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return k_; }
  Eigen::MatrixXd generator() const;

  bool doubly_stochastic(double tol = 1e-12) const;
  // Normalized left Perron vector: pi K = pi, sum pi = 1.
  const Eigen::VectorXd& stationary() const noexcept { return pi_; }

  // exp(s (K - I)), closed form for m = 2.
  Eigen::MatrixXd propagator(double s) const;

 private:
  Eigen::MatrixXd k_;
  Eigen::VectorXd pi_;
};

// Scaling and squaring with a degree-13 Pade approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace hjh
