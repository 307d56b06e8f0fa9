#pragma once

#include <cmath>

#include "nsplab/eigen_calculus.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Circular contour |z - center| = radius, trapezoid rule in angle with the
// nodes offset off the real axis. Trapezoid is spectrally accurate for the
// periodic integrand.
struct Contour {
  double center = 0.0;
  double radius = 0.0;
  int nodes = 64;

  Contour() = default;
  Contour(double e, double r, int m = 64) : center(e), radius(r), nodes(m) {
    require(r > 0.0, "Contour: radius must be positive");
    require(m >= 16, "Contour: node count must be at least 16");
  }

  Complex node(int m) const {
    const double theta = 2.0 * M_PI * (m + 0.5) / nodes;
    return center + radius * std::exp(kI * theta);
  }
};

namespace detail {

inline Matrix resolvent_or_throw(const Matrix& H, Complex z) {
  const int n = static_cast<int>(H.rows());
  Eigen::PartialPivLU<Matrix> lu(H - z * Matrix::Identity(n, n));
  const double rc = lu.rcond();
  if (!(rc > 1e-13))
    throw NumericalError("contour_projection: eigenvalue on or near the contour (rcond "
                         + std::to_string(rc) + ")");
  return lu.inverse();
}

}  // namespace detail

// P = -(1/2 pi i) oint (H - z)^{-1} dz over the contour. Conjugate node
// pairs are folded so only the upper half circle is solved and the output
// is Hermitian by construction.
inline Matrix contour_projection(const Matrix& H, const Contour& contour) {
  require(contour.nodes % 2 == 0, "contour_projection: node count must be even");
  const int n = static_cast<int>(H.rows());
  Matrix acc = Matrix::Zero(n, n);
  for (int m = 0; m < contour.nodes / 2; ++m) {
    const double theta = 2.0 * M_PI * (m + 0.5) / contour.nodes;
    const Complex z = contour.center + contour.radius * std::exp(kI * theta);
    acc += std::exp(kI * theta) * detail::resolvent_or_throw(H, z);
  }
  Matrix p = -(contour.radius / contour.nodes) * (acc + acc.adjoint());
  return p;
}

inline Matrix contour_projection(const DiscreteHamiltonian& H, const Contour& contour) {
  return contour_projection(H.matrix, contour);
}

// Doubles the node count until the projector-algebra residual ||P^2 - P||
// falls below tol.
inline Matrix contour_projection_adaptive(const Matrix& H, double center, double radius,
                                          double tol = 1e-8, int max_nodes = 4096) {
  int m = 32;
  Matrix p;
  while (true) {
    p = contour_projection(H, Contour(center, radius, m));
    if (operator_norm(p * p - p) <= tol) return p;
    if (m >= max_nodes)
      throw NumericalError("contour_projection: no convergence at max node count");
    m *= 2;
  }
}

// dP/ds via the contour formula -(1/2 pi i) oint R(z) Vdot R(z) dz,
// used to cross-check the finite-difference derivative of P_Omega.
inline Matrix contour_projection_derivative(const Matrix& H, const Matrix& Vdot,
                                            const Contour& contour) {
  require(contour.nodes % 2 == 0, "contour derivative: node count must be even");
  const int n = static_cast<int>(H.rows());
  Matrix acc = Matrix::Zero(n, n);
  for (int m = 0; m < contour.nodes / 2; ++m) {
    const double theta = 2.0 * M_PI * (m + 0.5) / contour.nodes;
    const Complex z = contour.center + contour.radius * std::exp(kI * theta);
    const Matrix r = detail::resolvent_or_throw(H, z);
    acc += std::exp(kI * theta) * (r * Vdot * r);
  }
  return -(contour.radius / contour.nodes) * (acc + acc.adjoint());
}

// Number of eigenvalues strictly inside the contour; oracle companion.
inline int enclosed_count(const EigenDecomposition& ed, const Contour& contour) {
  int k = 0;
  for (int i = 0; i < ed.size(); ++i)
    if (std::abs(ed.eigenvalues(i) - contour.center) < contour.radius) ++k;
  return k;
}

}  // namespace nsplab
