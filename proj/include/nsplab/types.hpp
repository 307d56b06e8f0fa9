#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace nsplab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using IndexVector = Eigen::VectorXi;

inline constexpr Complex kI{0.0, 1.0};

// Error taxonomy mirrors the CLI exit-code contract:
//   config/usage errors -> 2, numerical non-convergence -> 3,
//   violated mathematical preconditions -> 1 (gate failure at top level).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what)
      : std::invalid_argument(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

// Operator 2-norm. Hermitian inputs take the cheaper eigenvalue route.
inline double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double herm_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (herm_defect <= 1e-13 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// 2-norm of a possibly non-square (tall) block, e.g. ||(H-E) F|| for a frame F.
inline double thin_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace nsplab
