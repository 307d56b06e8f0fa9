#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "nsplab/grid.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Per-axis real vector potential A_i(x) with declared bounds on |A| and |dA|
// (Assumption on bounded magnetic data). Evaluated pointwise so the builder
// can sample link midpoints.
struct VectorPotentialField {
  using Evaluator = std::function<double(double, double)>;
  std::array<Evaluator, 2> component{};  // A_x, A_y
  double sup_bound = 0.0;                // declared bound on |A_i|
  double sup_derivative_bound = 0.0;     // declared bound on |dA_i|

  static VectorPotentialField zero() {
    VectorPotentialField f;
    f.component[0] = [](double, double) { return 0.0; };
    f.component[1] = [](double, double) { return 0.0; };
    return f;
  }

  bool is_zero() const { return sup_bound == 0.0; }

  double eval(int axis, double x, double y) const {
    return component[axis] ? component[axis](x, y) : 0.0;
  }

  // Verifies declared bounds by sampling values and first finite differences
  // over the grid. Returns the worst observed (|A|, |dA|) pair.
  std::pair<double, double> observed_bounds(const Grid& g) const {
    double worst_a = 0.0, worst_da = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const auto c = g.coords(i);
      for (int axis = 0; axis < g.dimension; ++axis) {
        const double a0 = eval(axis, c[0], c[1]);
        worst_a = std::max(worst_a, std::abs(a0));
        const double ax = eval(axis, c[0] + g.spacing, c[1]);
        worst_da = std::max(worst_da, std::abs(ax - a0) / g.spacing);
        if (g.dimension == 2) {
          const double ay = eval(axis, c[0], c[1] + g.spacing);
          worst_da = std::max(worst_da, std::abs(ay - a0) / g.spacing);
        }
      }
    }
    return {worst_a, worst_da};
  }
};

// Time-dependent scalar potential V(x,s) with analytic s-derivatives and a
// declared support mask for dV/ds (Assumption: supp Vdot(s) inside I(s)).
struct PotentialFamily {
  using Evaluator = std::function<double(double, double, double)>;  // (x, y, s)
  Evaluator value;
  Evaluator ds;    // dV/ds
  Evaluator ds2;   // d2V/ds2
  DomainMask ds_support;  // declared support of dV/ds; empty grid = "unknown/all"

  static PotentialFamily time_independent(std::function<double(double, double)> v) {
    PotentialFamily f;
    f.value = [v = std::move(v)](double x, double y, double) { return v(x, y); };
    f.ds = [](double, double, double) { return 0.0; };
    f.ds2 = [](double, double, double) { return 0.0; };
    return f;
  }

  double eval(double x, double y, double s) const { return value(x, y, s); }

  double eval_derivative(double x, double y, double s, int order) const {
    require(order == 1 || order == 2, "potential derivative order must be 1 or 2");
    return order == 1 ? ds(x, y, s) : ds2(x, y, s);
  }

  RealVector sample(const Grid& g, double s) const {
    RealVector v(g.size());
    for (int i = 0; i < g.size(); ++i) {
      const auto c = g.coords(i);
      const double val = value(c[0], c[1], s);
      if (!std::isfinite(val)) throw NumericalError("potential value not finite");
      v(i) = val;
    }
    return v;
  }

  RealVector sample_derivative(const Grid& g, double s, int order) const {
    RealVector v(g.size());
    for (int i = 0; i < g.size(); ++i) {
      const auto c = g.coords(i);
      v(i) = eval_derivative(c[0], c[1], s, order);
    }
    return v;
  }

  // Checks supp dV/ds(.,s) against the declared mask at one sample time.
  bool derivative_supported(const Grid& g, double s, double tol = 0.0) const {
    if (ds_support.in.empty()) return true;
    for (int i = 0; i < g.size(); ++i) {
      if (ds_support.in[i]) continue;
      const auto c = g.coords(i);
      if (std::abs(ds(c[0], c[1], s)) > tol) return false;
    }
    return true;
  }
};

}  // namespace nsplab
