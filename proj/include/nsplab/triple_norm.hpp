#pragma once

#include <cmath>

#include "nsplab/bump.hpp"
#include "nsplab/quadrature.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// |||g|||_{n+2} = sum_{k=0}^{n+2} || g^(k) ||_{k-n-1},
// with ||f||_l = int (1+x^2)^{l/2} |f(x)| dx and the generic prefactor
// pinned to C = 1. The supported indices are the three the bounds use.
struct TripleNormResult {
  double value = 0.0;
  int quadrature_panels = 0;
  double a = 0.0;
  int index = 0;
};

inline TripleNormResult triple_norm_detailed(const BumpFunction& g, int index,
                                             double rel_tol = 1e-11) {
  require(index == 3 || index == 4 || index == 5,
          "triple_norm: index must be one of {3,4,5}");
  const int n = index - 2;
  TripleNormResult res;
  res.a = g.a;
  res.index = index;
  for (int k = 0; k <= index; ++k) {
    const double l = static_cast<double>(k - n - 1);
    auto integrand = [&](double x) {
      return std::pow(1.0 + x * x, 0.5 * l) * std::abs(g.derivative(x, k));
    };
    // even integrand; the k >= 1 pieces live on the transition only
    const double lo = (k == 0) ? 0.0 : 0.5 * g.a;
    const auto r = quad::adaptive_integrate(integrand, lo, g.a, rel_tol);
    res.value += 2.0 * r.value;
    res.quadrature_panels += r.panels;
  }
  return res;
}

inline double triple_norm(const BumpFunction& g, int index, double rel_tol = 1e-11) {
  return triple_norm_detailed(g, index, rel_tol).value;
}

}  // namespace nsplab
