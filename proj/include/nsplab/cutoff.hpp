#pragma once

#include <cmath>

#include "nsplab/bump.hpp"
#include "nsplab/grid.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Smoothed characteristic function chi of the interface layer of Omega:
// chi = 1 on the collar dist <= c/8 around the boundary, decays through the
// degree-7 C^3 transition, and vanishes beyond dist = c/2. The discrete
// H^2 norm ||(1 - lap) chi||_2 is computed and compared against the c^{-2}
// normalization convention; the comparison is reported, not enforced.
struct CutoffField {
  Grid grid;
  RealVector chi;
  double margin_c = 0.0;
  DomainMask boundary;      // two-sided interface layer of Omega
  DomainMask collar_one;    // chi == 1
  DomainMask b_region;      // {chi == 1} intersect Omega
  double sobolev_22 = 0.0;  // sqrt( h^d sum |(1 - lap_h) chi|^2 )
  bool sobolev_within_convention = false;

  Matrix one_minus_chi_diagonal() const {
    Vector d(chi.size());
    for (int i = 0; i < chi.size(); ++i) d(i) = 1.0 - chi(i);
    return Matrix(d.asDiagonal());
  }
};

// Interface layer: points of Omega adjacent to the complement plus
// complement points adjacent to Omega.
inline DomainMask boundary_layer(const DomainMask& omega) {
  DomainMask b(omega.grid, omega.label + "_boundary");
  for (int i = 0; i < omega.grid.size(); ++i) {
    for (int nb : omega.grid.neighbors(i)) {
      if (omega.in[i] != omega.in[nb]) {
        b.in[i] = true;
        break;
      }
    }
  }
  return b;
}

inline double cutoff_profile(double dist, double c) {
  if (dist <= c / 8.0) return 1.0;
  if (dist >= c / 2.0) return 0.0;
  const double t = (dist - c / 8.0) / (3.0 * c / 8.0);
  return 1.0 - smoothstep3(t);
}

inline CutoffField build_cutoff(const DomainMask& omega, double c, const Grid& grid) {
  require(omega.grid == grid, "build_cutoff: mask grid mismatch");
  require(c > 0.0, "build_cutoff: margin must be positive");
  require(c / 2.0 >= grid.spacing,
          "build_cutoff: margin too small for the grid to resolve");
  CutoffField f;
  f.grid = grid;
  f.margin_c = c;
  f.boundary = boundary_layer(omega);
  require(!f.boundary.empty(), "build_cutoff: Omega has no interface layer");

  const RealVector dist = distance_to_mask(f.boundary);
  f.chi = RealVector::Zero(grid.size());
  f.collar_one = DomainMask(grid, "chi_one");
  for (int i = 0; i < grid.size(); ++i) {
    f.chi(i) = cutoff_profile(dist(i), c);
    if (f.chi(i) == 1.0) f.collar_one.in[i] = true;
  }
  f.b_region = f.collar_one.intersect(omega, "B");

  // the deep interior must survive the collar, otherwise the cutoff
  // swallows the states it is meant to trim
  bool interior_left = false;
  for (int i : omega.indices())
    if (dist(i) > c / 2.0) {
      interior_left = true;
      break;
    }
  require(interior_left, "build_cutoff: margin too large, collar covers Omega");

  // discrete (1 - laplacian) applied with the Dirichlet stencil
  const double h = grid.spacing;
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    double lap = -2.0 * grid.dimension * f.chi(i);
    for (int nb : grid.neighbors(i)) lap += f.chi(nb);
    lap /= h * h;
    const double v = f.chi(i) - lap;
    acc += v * v;
  }
  f.sobolev_22 = std::sqrt(acc * std::pow(h, grid.dimension));
  f.sobolev_within_convention = f.sobolev_22 <= 1.0 / (c * c);
  return f;
}

}  // namespace nsplab
