#include <catch_amalgamated.hpp>
#include <cmath>

#include "nsplab/contour.hpp"
#include "nsplab/hamiltonian.hpp"
#include "support/test_helpers.hpp"

using namespace nsplab;

TEST_CASE("contour around one eigenvalue of a diagonal matrix", "[contour]") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  const Matrix p = contour_projection(h, Contour(0.0, 0.5, 64));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  REQUIRE(max_abs(p - expected) <= 1e-10);
}

TEST_CASE("contour enclosing nothing integrates to zero", "[contour]") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  const Matrix p = contour_projection(h, Contour(5.0, 0.5, 64));
  REQUIRE(max_abs(p) <= 1e-10);
}

TEST_CASE("projector algebra and rank match the enclosed count", "[contour]") {
  RealVector eigs(6);
  eigs << -2.0, -0.4, -0.35, 0.9, 1.4, 2.2;
  const Matrix h = nsptest::hermitian_with_spectrum(eigs, 23);
  const Contour c(-0.4, 0.3, 128);
  const Matrix p = contour_projection(h, c);
  REQUIRE(operator_norm(p * p - p) <= 1e-10);
  REQUIRE(operator_norm(p - p.adjoint()) <= 1e-12);
  REQUIRE(enclosed_count(eigensolve(h), c) == 2);
  REQUIRE(std::lround(std::real(p.trace())) == 2);
}

TEST_CASE("contour projector converges to the spectral oracle", "[contour]") {
  // small double barrier, restricted to its interior box
  const Grid g(1, 80, 0.05, {0.05, 0.0});
  auto barrier = [](double x) {
    const double d1 = std::abs(x - 1.3), d2 = std::abs(x - 2.7);
    return 2.0 * (std::exp(-40.0 * d1 * d1) + std::exp(-40.0 * d2 * d2));
  };
  const auto H = build_hamiltonian(
      g, VectorPotentialField::zero(),
      PotentialFamily::time_independent([&](double x, double) { return barrier(x); }),
      0.0, 0.12);
  DomainMask omega(g, "omega");
  for (int i = 0; i < g.size(); ++i) omega.in[i] = g.x(i) > 0.9 && g.x(i) < 3.1;
  const auto Ho = restrict_dirichlet(H, omega);

  const auto ed = eigensolve(Ho);
  const double E = ed.eigenvalues(0);
  const double gap = ed.eigenvalues(1) - ed.eigenvalues(0);
  const Contour c(E, 0.5 * gap, 128);
  const Matrix p_contour = contour_projection(Ho.matrix, c);
  const Matrix p_eig = ed.eigenvectors.col(0) * ed.eigenvectors.col(0).adjoint();
  REQUIRE(operator_norm(p_contour - p_eig) <= 1e-8);
}

TEST_CASE("node doubling drives the algebra residual down", "[contour]") {
  RealVector eigs(4);
  eigs << 0.0, 0.21, 1.0, 1.7;
  const Matrix h = nsptest::hermitian_with_spectrum(eigs, 5);
  const double r32 = operator_norm(
      contour_projection(h, Contour(0.1, 0.15, 32)) *
          contour_projection(h, Contour(0.1, 0.15, 32)) -
      contour_projection(h, Contour(0.1, 0.15, 32)));
  const double r128 = operator_norm(
      contour_projection(h, Contour(0.1, 0.15, 128)) *
          contour_projection(h, Contour(0.1, 0.15, 128)) -
      contour_projection(h, Contour(0.1, 0.15, 128)));
  REQUIRE(r128 < r32);
  const Matrix p = contour_projection_adaptive(h, 0.1, 0.15);
  REQUIRE(operator_norm(p * p - p) <= 1e-8);
}

TEST_CASE("an eigenvalue sitting on the contour is detected", "[contour]") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  REQUIRE_THROWS_AS(contour_projection_adaptive(h, 0.0, 1.0, 1e-8, 512),
                    NumericalError);
}

TEST_CASE("derivative contour formula vanishes for a static family", "[contour]") {
  RealVector eigs(4);
  eigs << 0.0, 0.5, 1.2, 2.0;
  const Matrix h = nsptest::hermitian_with_spectrum(eigs, 9);
  const Matrix zero = Matrix::Zero(4, 4);
  const Matrix dp = contour_projection_derivative(h, zero, Contour(0.0, 0.25, 64));
  REQUIRE(max_abs(dp) <= 1e-12);
}
