#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "nsplab/types.hpp"

namespace nsplab {
namespace quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n; deterministic.
inline Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return r;
}

inline double gl_panel(const std::function<double(double)>& f, double lo, double hi,
                       const Rule& rule) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct AdaptiveResult {
  double value = 0.0;
  int panels = 0;
};

// Adaptive bisection with a fixed GL rule per panel. Splits until the
// two-half refinement changes the panel value by less than the share of
// the absolute/relative budget.
inline AdaptiveResult adaptive_integrate(const std::function<double(double)>& f,
                                         double lo, double hi, double rel_tol = 1e-11,
                                         double abs_tol = 1e-300, int max_depth = 32,
                                         int gl_order = 12) {
  static thread_local std::vector<Rule> cache;
  if (cache.size() <= static_cast<size_t>(gl_order)) cache.resize(gl_order + 1);
  if (cache[gl_order].nodes.empty()) cache[gl_order] = gauss_legendre(gl_order);
  const Rule& rule = cache[gl_order];

  AdaptiveResult res;
  struct Item {
    double lo, hi, coarse;
    int depth;
  };
  std::vector<Item> stack;
  stack.push_back({lo, hi, gl_panel(f, lo, hi, rule), 0});
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (it.lo + it.hi);
    const double left = gl_panel(f, it.lo, mid, rule);
    const double right = gl_panel(f, mid, it.hi, rule);
    const double fine = left + right;
    const double err = std::abs(fine - it.coarse);
    if (err <= abs_tol + rel_tol * std::abs(fine) || it.depth >= max_depth) {
      res.value += fine;
      res.panels += 2;
    } else {
      stack.push_back({it.lo, mid, left, it.depth + 1});
      stack.push_back({mid, it.hi, right, it.depth + 1});
    }
  }
  return res;
}

}  // namespace quad
}  // namespace nsplab
