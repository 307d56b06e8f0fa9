#include <catch_amalgamated.hpp>
#include <cmath>

#include "nsplab/eigen_calculus.hpp"
#include "support/test_helpers.hpp"

using namespace nsplab;

TEST_CASE("diagonal matrix is its own eigendecomposition", "[eigencalc]") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 1.0;
  h(1, 1) = 2.0;
  h(2, 2) = 3.0;
  const auto ed = eigensolve(h);
  REQUIRE(ed.eigenvalues(0) == Catch::Approx(1.0));
  REQUIRE(ed.eigenvalues(1) == Catch::Approx(2.0));
  REQUIRE(ed.eigenvalues(2) == Catch::Approx(3.0));
  REQUIRE(max_abs(ed.eigenvectors.cwiseAbs().cast<Complex>() -
                  Matrix::Identity(3, 3)) <= 1e-14);
}

TEST_CASE("random Hermitian reconstruction and orthonormality", "[eigencalc]") {
  const Matrix h = nsptest::random_hermitian(50, 7);
  const auto ed = eigensolve(h);
  REQUIRE(ed.reconstruction_residual(h) <= 1e-12);
  REQUIRE(ed.orthonormality_defect() <= 1e-12);
  for (int i = 1; i < 50; ++i) REQUIRE(ed.eigenvalues(i) >= ed.eigenvalues(i - 1));
}

TEST_CASE("non-Hermitian input is rejected", "[eigencalc]") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  REQUIRE_THROWS_AS(eigensolve(h), PreconditionError);
}

TEST_CASE("functional calculus through the eigenbasis is exact on polynomials",
          "[eigencalc]") {
  const Matrix h = nsptest::random_hermitian(20, 11);
  const auto ed = eigensolve(h);
  const Matrix h2 = function_of_operator_eig(ed, 0.0, [](double x) { return x * x; });
  REQUIRE(operator_norm(h2 - h * h) <= 1e-11 * operator_norm(h * h));
}

TEST_CASE("spectral gap of a simple spectrum", "[eigencalc]") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 0.0;
  h(1, 1) = 1.0;
  h(2, 2) = 3.0;
  const auto rep = spectral_gap(eigensolve(h), 1.0);
  REQUIRE(rep.gap == Catch::Approx(1.0));
  REQUIRE(rep.cluster.size() == 1);
}

TEST_CASE("degenerate pair forms one cluster", "[eigencalc]") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0 + 1e-12;
  h(2, 2) = 2.0;
  const auto rep = spectral_gap(eigensolve(h), 1.0);
  REQUIRE(rep.cluster.size() == 2);
  REQUIRE(rep.gap == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("energy far from the spectrum is rejected", "[eigencalc]") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  REQUIRE_THROWS_AS(spectral_gap(eigensolve(h), 0.5), PreconditionError);
}
