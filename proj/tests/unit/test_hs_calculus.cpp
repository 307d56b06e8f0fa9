#include <catch_amalgamated.hpp>
#include <cmath>

#include "nsplab/hs_calculus.hpp"
#include "nsplab/triple_norm.hpp"
#include "support/test_helpers.hpp"

using namespace nsplab;

TEST_CASE("plateau and far eigenvalues map to 1 and 0", "[hscalc]") {
  const double a = 0.3;
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 10.0 * a;
  const QuasiAnalyticExtension ext(build_bump(a));
  const Matrix r = hs_function_of_operator(h, 0.0, ext);
  REQUIRE(std::abs(r(0, 0) - 1.0) <= 1e-5);
  REQUIRE(std::abs(r(1, 1)) <= 1e-5);
  REQUIRE(std::abs(r(0, 1)) <= 1e-12);
}

TEST_CASE("HS calculus matches the eigensolve oracle at 1e-4", "[hscalc]") {
  const double a = 0.4;
  // eigenvalues spread across the bump window and beyond
  Matrix h = nsptest::random_hermitian(30, 3, 1.0);
  h *= 2.0 * a / operator_norm(h);
  const auto g = build_bump(a);
  const QuasiAnalyticExtension ext(g, 4);
  const Matrix subject = hs_function_of_operator(h, 0.0, ext);
  const Matrix oracle =
      function_of_operator_eig(eigensolve(h), 0.0, [&](double x) { return g(x); });
  const double scale = operator_norm(oracle);
  REQUIRE(operator_norm(subject - oracle) <= 1e-4 * scale + 1e-10);
}

TEST_CASE("HS result is Hermitian and commutes with H", "[hscalc]") {
  const double a = 0.35;
  const Matrix h = nsptest::random_hermitian(16, 21, a);
  const QuasiAnalyticExtension ext(build_bump(a));
  const Matrix r = hs_function_of_operator(h, 0.05, ext);
  REQUIRE(max_abs(r - r.adjoint()) == 0.0);  // folded construction
  const double comm = operator_norm(r * h - h * r);
  REQUIRE(comm <= 1e-4 * operator_norm(h));
}

TEST_CASE("scalar quadrature transfer error stays below 1e-4 on the window",
          "[hscalc]") {
  const double a = 0.25;
  const auto g = build_bump(a);
  const QuasiAnalyticExtension ext(g, 4);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double lam = -1.5 * a + 3.0 * a * i / 400.0;
    worst = std::max(worst, std::abs(hs_scalar(lam, 0.0, ext) - g(lam)));
  }
  INFO("worst scalar transfer error " << worst);
  REQUIRE(worst <= 1e-4);
}

TEST_CASE("dbar obeys the |y|^n vanishing bound near the axis", "[hscalc]") {
  const double a = 0.5;
  const auto g = build_bump(a);
  const QuasiAnalyticExtension ext(g, 4);
  double supk = 0.0;
  for (int k = 0; k <= 5; ++k) supk = std::max(supk, g.derivative_sup(k));
  for (double y : {1e-4, 1e-3, 1e-2, 0.2 * a, 0.45 * a}) {
    for (double x : {0.1 * a, 0.3 * a, 0.6 * a, 0.8 * a, 0.97 * a}) {
      REQUIRE(std::abs(ext.dbar(x, y)) <= std::pow(y, 4) * supk);
    }
  }
}

TEST_CASE("extension restricted to the axis reproduces the bump", "[hscalc]") {
  const auto g = build_bump(0.3);
  const QuasiAnalyticExtension ext(g);
  for (double x : {0.0, 0.1, 0.2, 0.25, 0.29}) {
    REQUIRE(std::abs(ext.extension(x, 0.0) - g(x)) <= 1e-14);
  }
  // supported in the rectangle |x|<=a, |y|<=a
  REQUIRE(std::abs(ext.extension(0.31, 0.1)) == 0.0);
  REQUIRE(std::abs(ext.extension(0.1, 0.31)) == 0.0);
}

TEST_CASE("moment integrals are controlled by the triple norms", "[hscalc]") {
  const auto g = build_bump(0.2);
  const QuasiAnalyticExtension ext(g, 4);
  for (int m : {1, 2, 3}) {
    const double lhs = hs_moment_integral(ext, m);
    const double rhs = triple_norm(g, m + 2);
    INFO("m=" << m << " lhs=" << lhs << " rhs=" << rhs);
    REQUIRE(lhs <= rhs);
  }
}

TEST_CASE("order outside [2,4] is rejected", "[hscalc]") {
  REQUIRE_THROWS_AS(QuasiAnalyticExtension(build_bump(0.2), 5), PreconditionError);
  REQUIRE_THROWS_AS(QuasiAnalyticExtension(build_bump(0.2), 1), PreconditionError);
}
