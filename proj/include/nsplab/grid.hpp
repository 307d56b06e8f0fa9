#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "nsplab/types.hpp"

namespace nsplab {

// Uniform lattice in 1 or 2 dimensions. Point coordinates are always
// reconstructed as origin + index*spacing so they are bit-reproducible.
struct Grid {
  int dimension = 1;
  int points_per_axis = 0;
  double spacing = 0.0;
  std::array<double, 2> origin{0.0, 0.0};

  Grid() = default;
  Grid(int dim, int n, double h, std::array<double, 2> org = {0.0, 0.0})
      : dimension(dim), points_per_axis(n), spacing(h), origin(org) {
    require(dim == 1 || dim == 2, "Grid: dimension must be 1 or 2");
    require(n > 0, "Grid: points_per_axis must be positive");
    require(h > 0.0, "Grid: spacing must be positive");
  }

  // 1D grid on [xmin, xmax] with n interior Dirichlet points.
  static Grid dirichlet_1d(double xmin, double xmax, int n) {
    require(n > 0 && xmax > xmin, "dirichlet_1d: bad interval");
    const double h = (xmax - xmin) / (n + 1);
    return Grid(1, n, h, {xmin + h, 0.0});
  }

  static Grid dirichlet_2d(double xmin, double xmax, int n) {
    require(n > 0 && xmax > xmin, "dirichlet_2d: bad interval");
    const double h = (xmax - xmin) / (n + 1);
    return Grid(2, n, h, {xmin + h, xmin + h});
  }

  int size() const {
    return dimension == 1 ? points_per_axis : points_per_axis * points_per_axis;
  }

  // Row-major flattening: index = iy*points_per_axis + ix in 2D.
  std::array<int, 2> unflatten(int idx) const {
    if (dimension == 1) return {idx, 0};
    return {idx % points_per_axis, idx / points_per_axis};
  }

  int flatten(int ix, int iy = 0) const {
    return dimension == 1 ? ix : iy * points_per_axis + ix;
  }

  std::array<double, 2> coords(int idx) const {
    const auto ij = unflatten(idx);
    return {origin[0] + ij[0] * spacing,
            dimension == 2 ? origin[1] + ij[1] * spacing : 0.0};
  }

  double x(int idx) const { return coords(idx)[0]; }
  double y(int idx) const { return coords(idx)[1]; }

  bool on_boundary(int idx) const {
    const auto ij = unflatten(idx);
    if (ij[0] == 0 || ij[0] == points_per_axis - 1) return true;
    if (dimension == 2 && (ij[1] == 0 || ij[1] == points_per_axis - 1)) return true;
    return false;
  }

  std::vector<int> neighbors(int idx) const {
    std::vector<int> out;
    const auto ij = unflatten(idx);
    if (ij[0] > 0) out.push_back(flatten(ij[0] - 1, ij[1]));
    if (ij[0] < points_per_axis - 1) out.push_back(flatten(ij[0] + 1, ij[1]));
    if (dimension == 2) {
      if (ij[1] > 0) out.push_back(flatten(ij[0], ij[1] - 1));
      if (ij[1] < points_per_axis - 1) out.push_back(flatten(ij[0], ij[1] + 1));
    }
    return out;
  }

  bool operator==(const Grid& o) const {
    return dimension == o.dimension && points_per_axis == o.points_per_axis &&
           spacing == o.spacing && origin == o.origin;
  }
};

// Boolean indicator over grid points: houses the paper's regions
// J(s), I(s), O(s), Omega(s), B(s), Lambda, ...
struct DomainMask {
  Grid grid;
  std::vector<bool> in;
  std::string label;

  DomainMask() = default;
  DomainMask(const Grid& g, std::string lbl = "")
      : grid(g), in(g.size(), false), label(std::move(lbl)) {}

  static DomainMask full(const Grid& g, std::string lbl = "full") {
    DomainMask m(g, std::move(lbl));
    std::fill(m.in.begin(), m.in.end(), true);
    return m;
  }

  int count() const { return static_cast<int>(std::count(in.begin(), in.end(), true)); }
  bool empty() const { return count() == 0; }

  DomainMask complement(std::string lbl = "") const {
    DomainMask m(grid, lbl.empty() ? ("not_" + label) : std::move(lbl));
    for (size_t i = 0; i < in.size(); ++i) m.in[i] = !in[i];
    return m;
  }

  DomainMask intersect(const DomainMask& o, std::string lbl = "") const {
    require(grid == o.grid, "mask intersect: grid mismatch");
    DomainMask m(grid, std::move(lbl));
    for (size_t i = 0; i < in.size(); ++i) m.in[i] = in[i] && o.in[i];
    return m;
  }

  DomainMask unite(const DomainMask& o, std::string lbl = "") const {
    require(grid == o.grid, "mask unite: grid mismatch");
    DomainMask m(grid, std::move(lbl));
    for (size_t i = 0; i < in.size(); ++i) m.in[i] = in[i] || o.in[i];
    return m;
  }

  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(in.size());
    for (size_t i = 0; i < in.size(); ++i)
      if (in[i]) out.push_back(static_cast<int>(i));
    return out;
  }

  int symmetric_difference_count(const DomainMask& o) const {
    require(grid == o.grid, "mask symdiff: grid mismatch");
    int n = 0;
    for (size_t i = 0; i < in.size(); ++i) n += (in[i] != o.in[i]);
    return n;
  }

  // 0/1 diagonal indicator as a grid function.
  RealVector indicator() const {
    RealVector v = RealVector::Zero(grid.size());
    for (size_t i = 0; i < in.size(); ++i) v(static_cast<int>(i)) = in[i] ? 1.0 : 0.0;
    return v;
  }
};

// Euclidean distance between point sets; infinity if either is empty.
inline double mask_distance(const DomainMask& a, const DomainMask& b) {
  require(a.grid == b.grid, "mask_distance: grid mismatch");
  const auto ia = a.indices();
  const auto ib = b.indices();
  if (ia.empty() || ib.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (int p : ia) {
    const auto cp = a.grid.coords(p);
    for (int q : ib) {
      const auto cq = b.grid.coords(q);
      const double dx = cp[0] - cq[0], dy = cp[1] - cq[1];
      best = std::min(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

// Distance from every grid point to the given set (multi-source BFS in the
// lattice metric, exact for axis-aligned geometry at desk scale; we refine
// with true Euclidean distance over the set for correctness).
inline RealVector distance_to_mask(const DomainMask& target) {
  const Grid& g = target.grid;
  RealVector d = RealVector::Constant(g.size(), std::numeric_limits<double>::infinity());
  const auto idx = target.indices();
  if (idx.empty()) return d;
  for (int i = 0; i < g.size(); ++i) {
    const auto ci = g.coords(i);
    double best = std::numeric_limits<double>::infinity();
    for (int q : idx) {
      const auto cq = g.coords(q);
      const double dx = ci[0] - cq[0], dy = ci[1] - cq[1];
      best = std::min(best, dx * dx + dy * dy);
    }
    d(i) = std::sqrt(best);
  }
  return d;
}

// Connected components of a mask under 4-neighbor adjacency.
inline std::vector<DomainMask> connected_components(const DomainMask& m) {
  std::vector<int> comp(m.grid.size(), -1);
  int ncomp = 0;
  for (int start = 0; start < m.grid.size(); ++start) {
    if (!m.in[start] || comp[start] >= 0) continue;
    std::queue<int> q;
    q.push(start);
    comp[start] = ncomp;
    while (!q.empty()) {
      const int p = q.front();
      q.pop();
      for (int nb : m.grid.neighbors(p)) {
        if (m.in[nb] && comp[nb] < 0) {
          comp[nb] = ncomp;
          q.push(nb);
        }
      }
    }
    ++ncomp;
  }
  std::vector<DomainMask> out;
  out.reserve(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    DomainMask mc(m.grid, m.label + "#" + std::to_string(c));
    for (int i = 0; i < m.grid.size(); ++i) mc.in[i] = (comp[i] == c);
    out.push_back(std::move(mc));
  }
  return out;
}

inline bool touches_box_boundary(const DomainMask& m) {
  for (int i : m.indices())
    if (m.grid.on_boundary(i)) return true;
  return false;
}

}  // namespace nsplab
