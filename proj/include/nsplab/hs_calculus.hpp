#pragma once

#include <cmath>
#include <vector>

#include "nsplab/bump.hpp"
#include "nsplab/eigen_calculus.hpp"
#include "nsplab/quadrature.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Node schedule for the plane integral. Panels in |y| are log-graded down to
// y_min = a * y_min_factor; the x-panels on the transition pieces shrink
// with |y| (the resolvent varies on scale |y| there) up to x_max_panels.
// The |y|^order damping of dbar makes the sub-y_min strip negligible.
struct HsQuadratureSpec {
  double y_min_factor = 1e-3;
  int y_panels_per_decade = 6;
  int y_gl = 6;
  int x_gl = 8;
  int x_min_panels = 2;
  int x_max_panels = 4;
  double x_refine = 1.0;   // target x-panel width ~ x_refine * y
  int center_x_panels = 3;
  int center_y_panels = 3;

  // defaults give ~5e-6 scalar transfer error; this preset reaches ~4e-8
  // for the exact-identity checks at roughly 4x the solve count
  static HsQuadratureSpec fine() {
    HsQuadratureSpec s;
    s.y_min_factor = 3e-4;
    s.y_panels_per_decade = 10;
    s.y_gl = 8;
    s.x_max_panels = 6;
    return s;
  }
};

// g_a extended off the real axis:
//   ext(x+iy) = sum_{k<=order} g^(k)(x) (iy)^k / k!  *  sigma(y/a),
// with sigma a C^4 plateau bump in y. order is capped at 4: g_a is C^4, so
// higher Taylor terms would make the extension discontinuous across the
// seams and break the representation.
struct QuasiAnalyticExtension {
  BumpFunction g;
  int order = 4;
  HsQuadratureSpec spec;

  QuasiAnalyticExtension() = default;
  explicit QuasiAnalyticExtension(const BumpFunction& bump, int n = 4,
                                  HsQuadratureSpec q = {})
      : g(bump), order(n), spec(q) {
    require(n >= 2 && n <= 4, "QuasiAnalyticExtension: order must be in [2,4]");
  }

  double sigma(double u, int k = 0) const {
    const double au = std::abs(u);
    if (au <= 0.5) return k == 0 ? 1.0 : 0.0;
    if (au >= 1.0) return 0.0;
    double v = -smoothstep4(2.0 * au - 1.0, k) * std::pow(2.0, k);
    if (k == 0) v += 1.0;
    if (u < 0.0 && (k % 2 == 1)) v = -v;
    return v;
  }

  Complex extension(double x, double y) const {
    Complex acc = 0.0;
    Complex iy_pow = 1.0;
    double kfac = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) {
        iy_pow *= Complex(0.0, y);
        kfac *= k;
      }
      acc += g.derivative(x, k) * iy_pow / kfac;
    }
    return acc * sigma(y / g.a);
  }

  // dbar of the extension: the |y|^order Taylor-remainder term plus the
  // sigma-cutoff term supported in a/2 <= |y| <= a.
  Complex dbar(double x, double y) const {
    const double a = g.a;
    Complex taylor_sum = 0.0;
    Complex iy_pow = 1.0;
    double kfac = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) {
        iy_pow *= Complex(0.0, y);
        kfac *= k;
      }
      taylor_sum += g.derivative(x, k) * iy_pow / kfac;
    }
    // after the loop iy_pow = (iy)^order, kfac = order!
    const Complex remainder = g.derivative(x, order + 1) * iy_pow / kfac * sigma(y / a);
    const Complex cutoff = (kI / a) * sigma(y / a, 1) * taylor_sum;
    return 0.5 * (remainder + cutoff);
  }
};

struct HsNode {
  Complex z;       // upper half plane
  Complex weight;  // dbar(z) * panel weight; lower half folded by h.c.
};

namespace hs_detail {

// y>0 node schedule; the y<0 half is recovered by Hermitian conjugation.
inline std::vector<HsNode> node_schedule(const QuasiAnalyticExtension& ext) {
  const double a = ext.g.a;
  const HsQuadratureSpec& q = ext.spec;
  static thread_local quad::Rule rx, ry;
  if (static_cast<int>(rx.nodes.size()) != q.x_gl) rx = quad::gauss_legendre(q.x_gl);
  if (static_cast<int>(ry.nodes.size()) != q.y_gl) ry = quad::gauss_legendre(q.y_gl);

  std::vector<HsNode> nodes;
  auto add_cell = [&](double x0, double x1, double y0, double y1) {
    const double xm = 0.5 * (x0 + x1), xh = 0.5 * (x1 - x0);
    const double ym = 0.5 * (y0 + y1), yh = 0.5 * (y1 - y0);
    for (size_t iy = 0; iy < ry.nodes.size(); ++iy) {
      const double y = ym + yh * ry.nodes[iy];
      for (size_t ix = 0; ix < rx.nodes.size(); ++ix) {
        const double x = xm + xh * rx.nodes[ix];
        const Complex w = ext.dbar(x, y) * (rx.weights[ix] * xh) * (ry.weights[iy] * yh);
        if (w != Complex(0.0, 0.0)) nodes.push_back({Complex(x, y), w});
      }
    }
  };

  // transition pieces, log-graded in y with y-dependent x-panels
  const double y_min = a * q.y_min_factor;
  const int n_ypan = std::max(
      1, static_cast<int>(std::ceil(q.y_panels_per_decade * std::log10(1.0 / q.y_min_factor))));
  for (int j = 0; j < n_ypan; ++j) {
    const double y0 = y_min * std::pow(a / y_min, static_cast<double>(j) / n_ypan);
    const double y1 = y_min * std::pow(a / y_min, static_cast<double>(j + 1) / n_ypan);
    const double piece = 0.5 * a;
    int npx = static_cast<int>(std::ceil(piece / (q.x_refine * y0)));
    npx = std::min(std::max(npx, q.x_min_panels), q.x_max_panels);
    for (int p = 0; p < npx; ++p) {
      const double xl = 0.5 * a + piece * p / npx;
      const double xr = 0.5 * a + piece * (p + 1) / npx;
      add_cell(xl, xr, y0, y1);
      add_cell(-xr, -xl, y0, y1);
    }
  }
  // center piece: only the sigma' band a/2 <= y <= a contributes
  for (int j = 0; j < q.center_y_panels; ++j) {
    const double y0 = 0.5 * a + 0.5 * a * j / q.center_y_panels;
    const double y1 = 0.5 * a + 0.5 * a * (j + 1) / q.center_y_panels;
    for (int p = 0; p < q.center_x_panels; ++p) {
      const double xl = -0.5 * a + a * p / q.center_x_panels;
      const double xr = -0.5 * a + a * (p + 1) / q.center_x_panels;
      add_cell(xl, xr, y0, y1);
    }
  }
  return nodes;
}

inline Matrix resolvent(const Matrix& shifted, Complex z, int n) {
  Eigen::PartialPivLU<Matrix> lu(shifted - z * Matrix::Identity(n, n));
  const double rc = lu.rcond();
  if (!(rc > 1e-14))
    throw NumericalError("hs quadrature: resolvent conditioning exceeds 1e14");
  return lu.inverse();
}

}  // namespace hs_detail

// g_a(H - E) via the Helffer-Sjostrand plane integral
//   (1/pi) int dbar(z) (H - E - z)^{-1} dx dy.
// One dense solve per upper-half node; no eigensolve anywhere on this path,
// so it stays an independent construction against the spectral oracle.
inline Matrix hs_function_of_operator(const Matrix& H, double E,
                                      const QuasiAnalyticExtension& ext) {
  const int n = static_cast<int>(H.rows());
  const Matrix shifted = H - E * Matrix::Identity(n, n);
  const auto nodes = hs_detail::node_schedule(ext);
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& nd : nodes)
    acc += nd.weight * hs_detail::resolvent(shifted, nd.z, n);
  return (acc + acc.adjoint()) / M_PI;
}

inline Matrix hs_function_of_operator(const DiscreteHamiltonian& H, double E,
                                      const QuasiAnalyticExtension& ext) {
  return hs_function_of_operator(H.matrix, E, ext);
}

// Same nodes applied to a scalar: the exact quadrature error transfer
// g_quad(lambda) - g(lambda). Used to tune schedules and bound operator
// errors spectrally (the operator error is diag of this scalar error).
inline double hs_scalar(double lambda, double E, const QuasiAnalyticExtension& ext) {
  const auto nodes = hs_detail::node_schedule(ext);
  Complex acc = 0.0;
  for (const auto& nd : nodes) acc += nd.weight / (lambda - E - nd.z);
  return 2.0 * std::real(acc) / M_PI;
}

// X1 = -(1/pi) int dbar(z) R(z) Pdot R(z) dx dy  (two solves per node).
inline Matrix hs_sandwich_operator(const Matrix& H, double E, const Matrix& middle,
                                   const QuasiAnalyticExtension& ext) {
  const int n = static_cast<int>(H.rows());
  const Matrix shifted = H - E * Matrix::Identity(n, n);
  const auto nodes = hs_detail::node_schedule(ext);
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& nd : nodes) {
    const Matrix r = hs_detail::resolvent(shifted, nd.z, n);
    acc += nd.weight * (r * middle * r);
  }
  return -(acc + acc.adjoint()) / M_PI;
}

// LHS of the moment bound: int |dbar| |Im z|^{-m-1} dx dy, adaptive in x,
// log-graded tensor panels in y (both signs by symmetry).
inline double hs_moment_integral(const QuasiAnalyticExtension& ext, int m,
                                 double rel_tol = 1e-9) {
  const double a = ext.g.a;
  require(m >= 1 && m < ext.order, "hs_moment_integral: need 1 <= m < order");
  const double y_min = a * ext.spec.y_min_factor;
  const int n_ypan = std::max(
      1, static_cast<int>(std::ceil(2.0 * ext.spec.y_panels_per_decade *
                                    std::log10(1.0 / ext.spec.y_min_factor))));
  static thread_local quad::Rule ry;
  if (ry.nodes.size() != 8) ry = quad::gauss_legendre(8);
  double total = 0.0;
  for (int j = 0; j < n_ypan; ++j) {
    const double y0 = y_min * std::pow(a / y_min, static_cast<double>(j) / n_ypan);
    const double y1 = y_min * std::pow(a / y_min, static_cast<double>(j + 1) / n_ypan);
    const double ym = 0.5 * (y0 + y1), yhalf = 0.5 * (y1 - y0);
    for (size_t iy = 0; iy < ry.nodes.size(); ++iy) {
      const double y = ym + yhalf * ry.nodes[iy];
      auto fx = [&](double x) { return std::abs(ext.dbar(x, y)); };
      const double line = quad::adaptive_integrate(fx, -a, a, rel_tol).value;
      total += 2.0 * ry.weights[iy] * yhalf * line * std::pow(y, -m - 1);
    }
  }
  return total;
}

}  // namespace nsplab
