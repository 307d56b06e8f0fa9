#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "nsplab/hamiltonian.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Dense Hermitian eigendecomposition; the oracle backend for all
// functional-calculus cross-checks.
struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns

  int size() const { return static_cast<int>(eigenvalues.size()); }

  double reconstruction_residual(const Matrix& H) const {
    const double scale = operator_norm(H);
    if (scale == 0.0) return 0.0;
    const Matrix R = eigenvectors * eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                     eigenvectors.adjoint();
    return operator_norm(H - R) / scale;
  }

  double orthonormality_defect() const {
    const Matrix G = eigenvectors.adjoint() * eigenvectors;
    return max_abs(G - Matrix::Identity(G.rows(), G.cols()));
  }
};

inline EigenDecomposition eigensolve(const Matrix& H) {
  const double scale = max_abs(H);
  require(scale == 0.0 || max_abs(H - H.adjoint()) <= 1e-12 * scale,
          "eigensolve: matrix is not Hermitian");
  EigenDecomposition out;
  // Magnetic-free operators are real symmetric; the real path is ~3x faster.
  if (H.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(H.real());
    if (es.info() != Eigen::Success) throw NumericalError("eigensolve: no convergence");
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolve: no convergence");
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = es.eigenvectors();
  }
  return out;
}

inline EigenDecomposition eigensolve(const DiscreteHamiltonian& H) {
  return eigensolve(H.matrix);
}

// Q g(Lambda - E) Q^dagger: exact functional calculus up to eigensolve residual.
inline Matrix function_of_operator_eig(const EigenDecomposition& ed, double shift,
                                       const std::function<double(double)>& g) {
  Vector d(ed.size());
  for (int i = 0; i < ed.size(); ++i) d(i) = g(ed.eigenvalues(i) - shift);
  return ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.adjoint();
}

struct SpectralGapReport {
  double gap = 0.0;                // distance from the E-cluster to the rest
  std::vector<int> cluster;        // indices of eigenvalues in the cluster
  double nearest_outside = 0.0;    // eigenvalue realizing the gap
};

// Gap of the eigenvalue cluster at E: cluster = eigenvalues within
// cluster_tol of E; gap = distance from the cluster to the remaining spectrum.
inline SpectralGapReport spectral_gap(const EigenDecomposition& ed, double E,
                                      double cluster_tol = 1e-9,
                                      double locate_tol = 1e-6) {
  require(ed.size() > 0, "spectral_gap: empty decomposition");
  double nearest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ed.size(); ++i)
    nearest = std::min(nearest, std::abs(ed.eigenvalues(i) - E));
  require(nearest <= locate_tol, "spectral_gap: E is not within tolerance of any eigenvalue");

  SpectralGapReport rep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < ed.size(); ++i) {
    if (std::abs(ed.eigenvalues(i) - E) <= cluster_tol + nearest) {
      rep.cluster.push_back(i);
      lo = std::min(lo, ed.eigenvalues(i));
      hi = std::max(hi, ed.eigenvalues(i));
    }
  }
  rep.gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ed.size(); ++i) {
    if (std::abs(ed.eigenvalues(i) - E) <= cluster_tol + nearest) continue;
    const double d = ed.eigenvalues(i) < lo ? lo - ed.eigenvalues(i)
                                            : ed.eigenvalues(i) - hi;
    if (d < rep.gap) {
      rep.gap = d;
      rep.nearest_outside = ed.eigenvalues(i);
    }
  }
  return rep;
}

}  // namespace nsplab
