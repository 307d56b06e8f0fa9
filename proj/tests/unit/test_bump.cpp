#include <catch_amalgamated.hpp>
#include <cmath>

#include "nsplab/bump.hpp"

using namespace nsplab;

TEST_CASE("bump takes its defining values", "[bump]") {
  const auto g = build_bump(0.4);
  REQUIRE(g(0.0) == 1.0);
  REQUIRE(g(0.19) == 1.0);
  REQUIRE(g(0.4) == 0.0);
  REQUIRE(g(0.5) == 0.0);
  const double mid = g(0.3);  // 3a/4
  REQUIRE(mid > 0.0);
  REQUIRE(mid < 1.0);
  REQUIRE_THROWS_AS(build_bump(1.0), PreconditionError);
  REQUIRE_THROWS_AS(build_bump(0.0), PreconditionError);
}

TEST_CASE("bump is even and confined to [0,1]", "[bump]") {
  const auto g = build_bump(0.37);
  for (int i = 0; i <= 200; ++i) {
    const double x = -0.5 + i * 0.005;
    REQUIRE(g(x) == g(-x));
    REQUIRE(g(x) >= 0.0);
    REQUIRE(g(x) <= 1.0);
  }
}

TEST_CASE("derivatives glue to zero at both seams", "[bump]") {
  const auto g = build_bump(0.5);
  const double eps = 1e-12;
  for (int k = 1; k <= 4; ++k) {
    // C^4 gluing: one seam-step in, the k-th derivative is still within the
    // Lipschitz cone of the (k+1)-st derivative
    const double cone = 2.0 * eps * g.derivative_sup(k + 1);
    REQUIRE(std::abs(g.derivative(0.25 + eps, k)) <= cone);  // a/2 from the right
    REQUIRE(std::abs(g.derivative(0.25, k)) == 0.0);         // plateau side
    REQUIRE(std::abs(g.derivative(0.5 - eps, k)) <= cone);   // a from the left
    REQUIRE(std::abs(g.derivative(0.5, k)) == 0.0);
  }
}

TEST_CASE("transition is the degree-9 gluing polynomial", "[bump]") {
  // p(a/2)=1, p(a)=0, p^(k)=0 at both seams for k=1..4; p(5th) nonzero inside
  const auto g = build_bump(0.6);
  REQUIRE(g.derivative(0.45, 5) != 0.0);
  // degree 9: the 10th derivative of the transition vanishes identically,
  // the 9th is a nonzero constant
  const double d9a = g.derivative(0.35, 9);
  const double d9b = g.derivative(0.55, 9);
  REQUIRE(d9a == Catch::Approx(d9b));
  REQUIRE(d9a != 0.0);
}

TEST_CASE("finite-difference 4th derivative is continuous across the seam",
          "[bump]") {
  const auto g = build_bump(0.5);
  auto fd4 = [&](double x, double h) {
    return (g(x - 2 * h) - 4 * g(x - h) + 6 * g(x) - 4 * g(x + h) + g(x + 2 * h)) /
           (h * h * h * h);
  };
  // g'''' is continuous (=0) at the seam, so the straddling stencil converges
  const double sup5 = g.derivative_sup(5);
  for (double seam : {0.25, 0.5}) {
    const double coarse = std::abs(fd4(seam, 2e-3));
    const double fine = std::abs(fd4(seam, 1e-3));
    REQUIRE(coarse <= 4e-3 * sup5);   // O(step) away from the jump in g^(5)
    REQUIRE(fine <= 2e-3 * sup5);
  }
}

TEST_CASE("analytic derivatives match finite differences inside the transition",
          "[bump]") {
  const auto g = build_bump(0.44);
  for (double x : {0.24, 0.3, 0.38, 0.42}) {
    const double h = 1e-6;
    const double fd = (g(x + h) - g(x - h)) / (2 * h);
    REQUIRE(g.derivative(x, 1) == Catch::Approx(fd).margin(1e-4));
    const double h2 = 1e-4;  // larger step: the second difference is noise-limited
    const double fd2 = (g(x + h2) - 2 * g(x) + g(x - h2)) / (h2 * h2);
    REQUIRE(g.derivative(x, 2) == Catch::Approx(fd2).margin(1e-3 * g.derivative_sup(2)));
  }
}

TEST_CASE("smoothstep transitions interpolate 0 to 1 with flat ends", "[bump]") {
  REQUIRE(smoothstep4(0.0) == 0.0);
  REQUIRE(smoothstep4(1.0) == 1.0);
  REQUIRE(smoothstep3(0.0) == 0.0);
  REQUIRE(smoothstep3(1.0) == 1.0);
  // the k-th derivative leaves 0 linearly; S4^(5) is bounded by 15120
  for (int k = 1; k <= 4; ++k) {
    REQUIRE(smoothstep4(1e-9, k) == Catch::Approx(0.0).margin(2e-9 * 15120.0));
    REQUIRE(smoothstep4(1.0 - 1e-9, k) == Catch::Approx(0.0).margin(2e-9 * 15120.0));
  }
  for (int k = 1; k <= 3; ++k) {
    REQUIRE(smoothstep3(1e-9, k) == Catch::Approx(0.0).margin(2e-5));
    REQUIRE(smoothstep3(1.0 - 1e-9, k) == Catch::Approx(0.0).margin(2e-5));
  }
}
