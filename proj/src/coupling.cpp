#include "hjh/coupling.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "hjh/errors.hpp"

namespace hjh {

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd k) : k_(std::move(k)) {
  if (k_.rows() == 0 || k_.rows() != k_.cols()) throw ConfigError("coupling matrix must be square and nonempty");
  if (k_.rows() > 8) throw ConfigError("coupling matrix limited to m <= 8");
  for (int i = 0; i < k_.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < k_.cols(); ++j) {
      if (!std::isfinite(k_(i, j)) || k_(i, j) < 0.0) throw ConfigError("coupling entries must be finite and nonnegative");
      row += k_(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12) throw ConfigError("coupling rows must sum to 1");
  }
  // Left Perron vector: null vector of (K - I)^T, normalized to sum 1.
  const int m = static_cast<int>(k_.rows());
  if (m == 1) {
    pi_ = Eigen::VectorXd::Ones(1);
    return;
  }
  Eigen::MatrixXd a = (k_ - Eigen::MatrixXd::Identity(m, m)).transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::MatrixXd ker = lu.kernel();
  if (ker.cols() != 1) throw ConfigError("coupling chain must be irreducible (unique stationary law)");
  pi_ = ker.col(0);
  pi_ /= pi_.sum();
  for (int i = 0; i < m; ++i)
    if (pi_(i) < -1e-12) throw ConfigError("stationary law has a negative entry");
}

CouplingMatrix CouplingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m) throw ConfigError("coupling matrix must be square");
    for (Eigen::Index j = 0; j < m; ++j) k(i, j) = rows[i][j];
  }
  return CouplingMatrix(std::move(k));
}

CouplingMatrix CouplingMatrix::two_state(double c1, double c2) {
  if (c1 <= 0.0 || c1 > 1.0 || c2 <= 0.0 || c2 > 1.0) throw ConfigError("two-state rates must lie in (0,1]");
  Eigen::MatrixXd k(2, 2);
  k << 1.0 - c1, c1, c2, 1.0 - c2;
  return CouplingMatrix(std::move(k));
}

CouplingMatrix CouplingMatrix::single() { return CouplingMatrix(Eigen::MatrixXd::Ones(1, 1)); }

Eigen::MatrixXd CouplingMatrix::generator() const {
  return k_ - Eigen::MatrixXd::Identity(k_.rows(), k_.cols());
}

bool CouplingMatrix::doubly_stochastic(double tol) const {
  for (int j = 0; j < k_.cols(); ++j)
    if (std::abs(k_.col(j).sum() - 1.0) > tol) return false;
  return true;
}

Eigen::MatrixXd CouplingMatrix::propagator(double s) const {
  const int m = this->m();
  if (m == 1) return Eigen::MatrixXd::Ones(1, 1);
  if (m == 2) {
    // Q = [[-a, a], [b, -b]]; exp(sQ) = P_inf + e^{-(a+b)s} (I - P_inf)
    const double a = k_(0, 1), b = k_(1, 0);
    const double r = a + b;
    const double e = std::exp(-r * s);
    Eigen::MatrixXd p(2, 2);
    const double pa = b / r, pb = a / r;
    p << pa + pb * e, pb - pb * e, pa - pa * e, pb + pa * e;
    return p;
  }
  return expm(s * generator());
}

namespace {

// Pade(13) coefficients, Higham 2005.
constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  const Eigen::MatrixXd x = a / std::ldexp(1.0, squarings);
  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd x4 = x2 * x2;
  const Eigen::MatrixXd x6 = x4 * x2;
  const double* b = kPade13;
  const Eigen::MatrixXd u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id;
  const Eigen::MatrixXd u = x * u_inner;
  const Eigen::MatrixXd v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;
  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

}  // namespace hjh
