#pragma once

#include <cmath>
#include <string>

#include "nsplab/bump.hpp"
#include "nsplab/eigen_calculus.hpp"
#include "nsplab/hamiltonian.hpp"
#include "nsplab/hs_calculus.hpp"
#include "nsplab/projection.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// [Pdot, P] = [X, H - E] + Y with the explicit constructions of the two
// lemmas, as executable diagnostics.
struct CommutatorDecomposition {
  Matrix X, Y;
  int variant = 1;
  double residual = 0.0;        // || [Pdot,P] - [X,H-E] - Y ||
  double lhs_norm = 0.0;        // || [Pdot,P] ||
  double x_norm = 0.0, y_norm = 0.0;
  std::string route;            // construction used for X
};

enum class X1Route { hs, eig };
enum class X2Route { spectral_complement, full_resolvent };

namespace decomp_detail {

// divided-difference functional calculus: X1 in the eigenbasis is
// Pdot_{ij} * (g(l_i - E) - g(l_j - E)) / (l_i - l_j), the exact solution of
// [X1, H] = [Pdot, g(H)].
inline Matrix x1_divided_difference(const EigenDecomposition& ed, double E,
                                    const Matrix& p_dot, const BumpFunction& g) {
  const int n = ed.size();
  const Matrix b = ed.eigenvectors.adjoint() * p_dot * ed.eigenvectors;
  Matrix k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double xi = ed.eigenvalues(i) - E, xj = ed.eigenvalues(j) - E;
      if (std::abs(xi - xj) < 1e-9)
        k(i, j) = g.derivative(0.5 * (xi + xj), 1);
      else
        k(i, j) = (g(xi) - g(xj)) / (xi - xj);
    }
  }
  return ed.eigenvectors * k.cwiseProduct(b) * ed.eigenvectors.adjoint();
}

}  // namespace decomp_detail

// Lemma 1 pair: X1 from the resolvent-sandwich plane integral (or its
// divided-difference oracle), Y1 = [Pdot, P - g_a(H-E)] with the spectral
// calculus. The residual then measures || [X1, H-E] - [Pdot, g_a(H-E)] ||.
inline CommutatorDecomposition decompose_commutator_v1(
    const DiscreteHamiltonian& H, double E, const ProjectionFrame& P,
    const Matrix& p_dot, const BumpFunction& g, X1Route route = X1Route::hs,
    const HsQuadratureSpec& spec = {}) {
  const int n = H.size();
  require(p_dot.rows() == n && p_dot.cols() == n, "decompose: Pdot size mismatch");
  const auto ed = eigensolve(H);

  CommutatorDecomposition out;
  out.variant = 1;
  if (route == X1Route::hs) {
    const QuasiAnalyticExtension ext(g, 4, spec);
    out.X = hs_sandwich_operator(H.matrix, E, p_dot, ext);
    out.route = "hs";
  } else {
    out.X = decomp_detail::x1_divided_difference(ed, E, p_dot, g);
    out.route = "eig";
  }

  const Matrix gH = function_of_operator_eig(ed, E, [&](double x) { return g(x); });
  const Matrix proj = P.projector();
  out.Y = p_dot * (proj - gH) - (proj - gH) * p_dot;

  const Matrix lhs = p_dot * proj - proj * p_dot;
  const Matrix shifted = H.matrix - E * Matrix::Identity(n, n);
  const Matrix resid = lhs - (out.X * shifted - shifted * out.X) - out.Y;
  out.residual = operator_norm(resid);
  out.lhs_norm = operator_norm(lhs);
  out.x_norm = operator_norm(out.X);
  out.y_norm = operator_norm(out.Y);
  return out;
}

// Lemma 2 pair: X2 = (1 - g_a(H-E)) R^2(0) Hdot P + h.c. The default reading
// takes R^2(0) on the spectral complement of the g_a plateau, where the
// (1 - g_a) prefactor already vanishes; the full-resolvent reading requires
// a spectral margin at 0 and is kept for comparison. Y2 is defined by the
// representation, so the residual is zero by construction and the content
// lives in the norm bounds of X2 and Y2.
inline CommutatorDecomposition decompose_commutator_v2(
    const DiscreteHamiltonian& H, double E, const ProjectionFrame& P,
    const Matrix& p_dot, const Matrix& h_dot, const BumpFunction& g,
    X2Route route = X2Route::spectral_complement, double margin_factor = 0.25) {
  const int n = H.size();
  const auto ed = eigensolve(H);

  CommutatorDecomposition out;
  out.variant = 2;
  Matrix weighted;  // (1 - g_a(H-E)) R^2(0)
  if (route == X2Route::spectral_complement) {
    weighted = function_of_operator_eig(ed, E, [&](double x) {
      const double w = 1.0 - g(x);
      return w == 0.0 ? 0.0 : w / (x * x);
    });
    out.route = "spectral_complement";
  } else {
    const double margin = margin_factor * g.a;
    for (int i = 0; i < n; ++i)
      if (std::abs(ed.eigenvalues(i) - E) < margin)
        throw PreconditionError(
            "decompose_commutator_v2: spectral margin violation at z=0 "
            "(eigenvalue within " + std::to_string(margin) + " of E)");
    const Matrix shifted = H.matrix - E * Matrix::Identity(n, n);
    const Matrix r = shifted.partialPivLu().inverse();
    const Matrix one_minus_g =
        function_of_operator_eig(ed, E, [&](double x) { return 1.0 - g(x); });
    weighted = one_minus_g * r * r;
    out.route = "full_resolvent";
  }

  const Matrix proj = P.projector();
  const Matrix half = weighted * h_dot * proj;
  out.X = half + half.adjoint();

  const Matrix lhs = p_dot * proj - proj * p_dot;
  const Matrix shifted = H.matrix - E * Matrix::Identity(n, n);
  out.Y = lhs - (out.X * shifted - shifted * out.X);
  out.residual = 0.0;  // Y2 is defined by the representation
  out.lhs_norm = operator_norm(lhs);
  out.x_norm = operator_norm(out.X);
  out.y_norm = operator_norm(out.Y);
  return out;
}

// RHS of the Y1 inequality: 2 delta' + 2 ||Pdot|| |||g|||_3 delta, C = 1.
inline double y1_bound_rhs(double delta, double delta_prime, double pdot_norm,
                           double g3) {
  return 2.0 * delta_prime + 2.0 * pdot_norm * g3 * delta;
}

}  // namespace nsplab
