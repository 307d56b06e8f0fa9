#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "nsplab/types.hpp"

namespace nsplab {

namespace poly {

// k-th derivative of a polynomial given by ascending coefficients.
inline double eval_derivative(const std::vector<double>& coeffs, double u, int k) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (k > deg) return 0.0;
  double acc = 0.0;
  double up = 1.0;
  for (int j = k; j <= deg; ++j) {
    double factor = 1.0;
    for (int m = 0; m < k; ++m) factor *= (j - m);
    acc += coeffs[static_cast<size_t>(j)] * factor * up;
    up *= u;
  }
  return acc;
}

}  // namespace poly

// smoothstep S_N on [0,1]: S_N(0)=0, S_N(1)=1, derivatives 1..N vanish at
// both endpoints. S4 (degree 9) drives the C^4 bump g_a; S3 (degree 7) is
// the C^2-and-better transition used for spatial cutoffs.
inline const std::vector<double>& smoothstep4_coeffs() {
  static const std::vector<double> c = {0, 0, 0, 0, 0, 126, -420, 540, -315, 70};
  return c;
}

inline const std::vector<double>& smoothstep3_coeffs() {
  static const std::vector<double> c = {0, 0, 0, 0, 35, -84, 70, -20};
  return c;
}

namespace poly {

// S_N is symmetric about (1/2, 1/2); evaluating the reflected branch for
// u > 1/2 avoids the catastrophic cancellation of the direct power sum
// near the flat top.
inline double eval_smoothstep(const std::vector<double>& coeffs, double u, int k) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return k == 0 ? 1.0 : 0.0;
  if (u <= 0.5) return eval_derivative(coeffs, u, k);
  const double r = eval_derivative(coeffs, 1.0 - u, k);
  if (k == 0) return 1.0 - r;
  return (k % 2 == 1) ? r : -r;
}

}  // namespace poly

inline double smoothstep4(double u, int k = 0) {
  return poly::eval_smoothstep(smoothstep4_coeffs(), u, k);
}

inline double smoothstep3(double u, int k = 0) {
  return poly::eval_smoothstep(smoothstep3_coeffs(), u, k);
}

// The smoothed characteristic function g_a:
//   g(x) = 1 for |x| <= a/2, 0 for |x| >= a, C^4 across the seams, with the
//   transition on [a/2, a] given by the unique degree-9 polynomial whose
//   derivatives of order 1..4 vanish at both seam points.
struct BumpFunction {
  double a = 0.5;

  double width() const { return a; }

  // k-th derivative, exact for the piecewise polynomial (k <= 9).
  double derivative(double x, int k) const {
    const double ax = std::abs(x);
    if (ax <= 0.5 * a) return k == 0 ? 1.0 : 0.0;
    if (ax >= a) return 0.0;
    const double t = (ax - 0.5 * a) / (0.5 * a);
    double val;
    if (k == 0) {
      // complement evaluated on whichever branch avoids cancellation
      val = t <= 0.5 ? 1.0 - poly::eval_derivative(smoothstep4_coeffs(), t, 0)
                     : poly::eval_derivative(smoothstep4_coeffs(), 1.0 - t, 0);
    } else {
      val = -smoothstep4(t, k) * std::pow(2.0 / a, k);
      if (x < 0.0 && (k % 2 == 1)) val = -val;
    }
    return val;
  }

  double operator()(double x) const { return derivative(x, 0); }

  // sup over x of |g^(k)|, computed on a dense transition sample.
  double derivative_sup(int k, int samples = 4001) const {
    if (k == 0) return 1.0;
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double x = 0.5 * a + (0.5 * a) * i / samples;
      worst = std::max(worst, std::abs(derivative(x, k)));
    }
    return worst;
  }
};

inline BumpFunction build_bump(double a) {
  require(a > 0.0 && a < 1.0, "build_bump: width a must lie in (0,1)");
  return BumpFunction{a};
}

}  // namespace nsplab
