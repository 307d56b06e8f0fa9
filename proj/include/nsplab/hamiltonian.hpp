#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nsplab/fields.hpp"
#include "nsplab/grid.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Dense Hermitian realization of (-i*hbar*grad - A)^2 + V on a lattice,
// either on the full box or Dirichlet-restricted to a sub-mask. The matrix
// acts on the masked points only; embedding back into the box is explicit.
struct DiscreteHamiltonian {
  Matrix matrix;          // n x n on mask points, Hermitian
  double hbar = 1.0;
  double s = 0.0;
  DomainMask domain;      // which grid points the rows/columns represent
  std::string provenance; // "full" | "dirichlet-restricted"

  int size() const { return static_cast<int>(matrix.rows()); }
  const Grid& grid() const { return domain.grid; }

  double hermiticity_defect() const {
    const double scale = max_abs(matrix);
    if (scale == 0.0) return 0.0;
    return max_abs(matrix - matrix.adjoint()) / scale;
  }

  // Extend a vector on the mask by zero to the full grid.
  Vector embed(const Vector& v) const {
    const auto idx = domain.indices();
    require(v.size() == static_cast<int>(idx.size()), "embed: size mismatch");
    Vector out = Vector::Zero(grid().size());
    for (size_t k = 0; k < idx.size(); ++k) out(idx[k]) = v(static_cast<int>(k));
    return out;
  }

  Matrix embed_columns(const Matrix& m) const {
    const auto idx = domain.indices();
    require(m.rows() == static_cast<int>(idx.size()), "embed: size mismatch");
    Matrix out = Matrix::Zero(grid().size(), m.cols());
    for (size_t k = 0; k < idx.size(); ++k) out.row(idx[k]) = m.row(static_cast<int>(k));
    return out;
  }

  Vector restrict(const Vector& v) const {
    const auto idx = domain.indices();
    require(v.size() == grid().size(), "restrict: size mismatch");
    Vector out(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) out(static_cast<int>(k)) = v(idx[k]);
    return out;
  }
};

namespace detail {

// Kinetic off-diagonal coupling along one link with A sampled at the link
// midpoint: row j gets  -hbar^2/h^2 + i*hbar*A_mid/h  on neighbor j+e.
// Together with the |A|^2 + V diagonal this reproduces
// (-i hbar grad - A)^2 + V to second order and is Hermitian by construction.
inline Complex link_coupling(double hbar, double h, double a_mid) {
  return Complex(-hbar * hbar / (h * h), hbar * a_mid / h);
}

}  // namespace detail

inline DiscreteHamiltonian build_hamiltonian(const Grid& grid,
                                             const VectorPotentialField& A,
                                             const PotentialFamily& V,
                                             double s, double hbar) {
  require(hbar > 0.0, "build_hamiltonian: hbar must be positive");
  const int n = grid.size();
  const double h = grid.spacing;
  const double kin_diag = 2.0 * grid.dimension * hbar * hbar / (h * h);

  Matrix H = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto c = grid.coords(i);
    const double v = V.eval(c[0], c[1], s);
    if (!std::isfinite(v)) throw NumericalError("build_hamiltonian: non-finite potential");
    double a2 = 0.0;
    for (int axis = 0; axis < grid.dimension; ++axis) {
      const double ai = A.eval(axis, c[0], c[1]);
      a2 += ai * ai;
    }
    H(i, i) = kin_diag + a2 + v;

    const auto ij = grid.unflatten(i);
    // forward links only; the adjoint entry is forced
    if (ij[0] + 1 < grid.points_per_axis) {
      const int j = grid.flatten(ij[0] + 1, ij[1]);
      const double a_mid = A.eval(0, c[0] + 0.5 * h, c[1]);
      const Complex t = detail::link_coupling(hbar, h, a_mid);
      H(i, j) = t;
      H(j, i) = std::conj(t);
    }
    if (grid.dimension == 2 && ij[1] + 1 < grid.points_per_axis) {
      const int j = grid.flatten(ij[0], ij[1] + 1);
      const double a_mid = A.eval(1, c[0], c[1] + 0.5 * h);
      const Complex t = detail::link_coupling(hbar, h, a_mid);
      H(i, j) = t;
      H(j, i) = std::conj(t);
    }
  }

  DiscreteHamiltonian out;
  out.matrix = std::move(H);
  out.hbar = hbar;
  out.s = s;
  out.domain = DomainMask::full(grid);
  out.provenance = "full";
  return out;
}

// Principal submatrix on the masked points: the discrete stand-in for the
// Friedrichs extension of the Dirichlet restriction.
inline DiscreteHamiltonian restrict_dirichlet(const DiscreteHamiltonian& H,
                                              const DomainMask& mask) {
  require(!mask.empty(), "restrict_dirichlet: empty mask");
  require(mask.grid == H.grid(), "restrict_dirichlet: grid mismatch");
  for (int i = 0; i < mask.grid.size(); ++i)
    require(!mask.in[i] || H.domain.in[i],
            "restrict_dirichlet: mask not contained in operator domain");

  // positions of mask points inside H's own index set
  std::vector<int> pos;
  {
    std::vector<int> where(mask.grid.size(), -1);
    const auto hidx = H.domain.indices();
    for (size_t k = 0; k < hidx.size(); ++k) where[hidx[k]] = static_cast<int>(k);
    for (int i : mask.indices()) pos.push_back(where[i]);
  }
  const int m = static_cast<int>(pos.size());
  Matrix sub(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) sub(r, c) = H.matrix(pos[r], pos[c]);

  DiscreteHamiltonian out;
  out.matrix = std::move(sub);
  out.hbar = H.hbar;
  out.s = H.s;
  out.domain = mask;
  out.provenance = "dirichlet-restricted";
  return out;
}

// Diagonal multiplication operator for dV/ds or d2V/ds2 on the given domain.
// Entries vanish off the declared support mask by construction of V.
inline Matrix potential_derivative_operator(const PotentialFamily& V, double s,
                                            int order, const DomainMask& domain) {
  require(order == 1 || order == 2, "potential_derivative_operator: order must be 1 or 2");
  require(s >= 0.0 && s <= 1.0, "potential_derivative_operator: s outside [0,1]");
  const auto idx = domain.indices();
  Matrix D = Matrix::Zero(idx.size(), idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    const auto c = domain.grid.coords(idx[k]);
    D(static_cast<int>(k), static_cast<int>(k)) =
        V.eval_derivative(c[0], c[1], s, order);
  }
  return D;
}

// [H, Theta] for a real multiplier, computed directly as matrix products.
// Support is contained in the stencil-dilated support of grad Theta.
inline Matrix commutator_with_multiplier(const DiscreteHamiltonian& H,
                                         const RealVector& theta) {
  require(theta.size() == H.size() || theta.size() == H.grid().size(),
          "commutator_with_multiplier: multiplier size mismatch");
  RealVector th = theta;
  if (theta.size() == H.grid().size() && H.size() != H.grid().size()) {
    const auto idx = H.domain.indices();
    th.resize(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) th(static_cast<int>(k)) = theta(idx[k]);
  }
  const Matrix T = th.cast<Complex>().asDiagonal();
  return H.matrix * T - T * H.matrix;
}

}  // namespace nsplab
