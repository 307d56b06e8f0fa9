#include <catch_amalgamated.hpp>
#include <cmath>

#include "nsplab/eigen_calculus.hpp"
#include "nsplab/hamiltonian.hpp"
#include "support/test_helpers.hpp"

using namespace nsplab;

namespace {

PotentialFamily zero_potential() {
  return PotentialFamily::time_independent([](double, double) { return 0.0; });
}

// analytic spectrum of the N-point discrete Dirichlet Laplacian, spacing h:
// (hbar^2/h^2) * (2 - 2 cos(k pi / (N+1)))
RealVector dirichlet_laplacian_spectrum(int n, double h, double hbar) {
  RealVector e(n);
  for (int k = 1; k <= n; ++k)
    e(k - 1) = hbar * hbar / (h * h) * (2.0 - 2.0 * std::cos(k * M_PI / (n + 1)));
  std::sort(e.data(), e.data() + n);
  return e;
}

}  // namespace

TEST_CASE("free 1D Hamiltonian reproduces the analytic Dirichlet spectrum",
          "[hamiltonian]") {
  const Grid g(1, 4, 1.0, {1.0, 0.0});
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, 1.0);
  const auto ed = eigensolve(H);
  const auto expected = dirichlet_laplacian_spectrum(4, 1.0, 1.0);
  for (int k = 0; k < 4; ++k)
    REQUIRE(ed.eigenvalues(k) == Catch::Approx(expected(k)).margin(1e-13));
}

TEST_CASE("constant potential shifts the Hamiltonian exactly", "[hamiltonian]") {
  const Grid g(1, 12, 0.25, {0.0, 0.0});
  const double c = 0.7531;
  const auto H0 = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                    0.0, 0.5);
  const auto Hc = build_hamiltonian(
      g, VectorPotentialField::zero(),
      PotentialFamily::time_independent([c](double, double) { return c; }), 0.0, 0.5);
  const Matrix diff = Hc.matrix - H0.matrix - c * Matrix::Identity(12, 12);
  // exact up to one rounding of the diagonal accumulation
  REQUIRE(max_abs(diff) <= 2e-16 * max_abs(Hc.matrix));
}

TEST_CASE("magnetic Hamiltonian is Hermitian to construction precision",
          "[hamiltonian]") {
  const Grid g = Grid::dirichlet_2d(-1.0, 1.0, 12);
  VectorPotentialField A;
  A.component[0] = [](double x, double y) { return 0.8 * std::sin(1.3 * x + y); };
  A.component[1] = [](double x, double y) { return -0.5 * std::cos(x - 0.7 * y); };
  A.sup_bound = 0.8;
  A.sup_derivative_bound = 1.6;
  const auto H = build_hamiltonian(g, A,
                                   PotentialFamily::time_independent([](double x, double y) {
                                     return x * x + 0.3 * y;
                                   }),
                                   0.0, 0.3);
  REQUIRE(H.hermiticity_defect() <= 1e-14);
  const auto [sup_a, sup_da] = A.observed_bounds(g);
  REQUIRE(sup_a <= A.sup_bound * (1 + 1e-12));
  REQUIRE(sup_da <= A.sup_derivative_bound * (1 + 1e-12));
}

TEST_CASE("restriction to the full domain is the identity", "[hamiltonian]") {
  const Grid g(1, 8, 0.5, {0.0, 0.0});
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, 1.0);
  const auto Hr = restrict_dirichlet(H, DomainMask::full(g));
  REQUIRE(max_abs(Hr.matrix - H.matrix) == 0.0);
  REQUIRE(Hr.provenance == "dirichlet-restricted");
}

TEST_CASE("middle restriction reproduces the smaller Dirichlet spectrum",
          "[hamiltonian]") {
  const Grid g(1, 8, 1.0, {1.0, 0.0});
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, 1.0);
  DomainMask mid(g, "mid");
  for (int i = 2; i < 6; ++i) mid.in[i] = true;
  const auto Hm = restrict_dirichlet(H, mid);
  const auto ed = eigensolve(Hm);
  const auto expected = dirichlet_laplacian_spectrum(4, 1.0, 1.0);
  for (int k = 0; k < 4; ++k)
    REQUIRE(ed.eigenvalues(k) == Catch::Approx(expected(k)).margin(1e-13));
}

TEST_CASE("principal submatrix restriction respects eigenvalue interlacing",
          "[hamiltonian]") {
  const Grid g(1, 16, 0.5, {0.0, 0.0});
  const auto V = PotentialFamily::time_independent(
      [](double x, double) { return 0.5 * x * x; });  // V >= 0
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), V, 0.0, 1.0);
  DomainMask sub(g, "sub");
  for (int i = 4; i < 12; ++i) sub.in[i] = true;
  const auto Hs = restrict_dirichlet(H, sub);
  REQUIRE(eigensolve(Hs).eigenvalues(0) >= eigensolve(H).eigenvalues(0) - 1e-13);
}

TEST_CASE("empty mask restriction is rejected", "[hamiltonian]") {
  const Grid g(1, 4, 1.0);
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, 1.0);
  REQUIRE_THROWS_AS(restrict_dirichlet(H, DomainMask(g)), PreconditionError);
}

TEST_CASE("potential derivative operator: s-independent and linear families",
          "[hamiltonian]") {
  const Grid g(1, 6, 0.5, {0.0, 0.0});
  const auto mask = DomainMask::full(g);

  const auto Vstatic = zero_potential();
  REQUIRE(max_abs(potential_derivative_operator(Vstatic, 0.3, 1, mask)) == 0.0);

  PotentialFamily Vlin;
  Vlin.value = [](double x, double, double s) { return s * (1.0 + x); };
  Vlin.ds = [](double x, double, double) { return 1.0 + x; };
  Vlin.ds2 = [](double, double, double) { return 0.0; };
  const Matrix D = potential_derivative_operator(Vlin, 0.25, 1, mask);
  for (int i = 0; i < 6; ++i)
    REQUIRE(std::real(D(i, i)) == Catch::Approx(1.0 + g.x(i)));
  REQUIRE(max_abs(potential_derivative_operator(Vlin, 0.25, 2, mask)) == 0.0);
  REQUIRE_THROWS_AS(potential_derivative_operator(Vlin, 1.5, 1, mask),
                    PreconditionError);
}

TEST_CASE("|| Vdot (H_Omega - i)^{-1} || is finite and reported", "[hamiltonian]") {
  const Grid g(1, 40, 0.2, {-4.0, 0.0});
  PotentialFamily V;
  V.value = [](double x, double, double s) { return x * x + s * std::exp(-x * x); };
  V.ds = [](double x, double, double) { return std::exp(-x * x); };
  V.ds2 = [](double, double, double) { return 0.0; };
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), V, 0.4, 1.0);
  const Matrix D = potential_derivative_operator(V, 0.4, 1, H.domain);
  const int n = H.size();
  const Matrix R = (H.matrix - kI * Matrix::Identity(n, n)).partialPivLu().inverse();
  const double bound = operator_norm(D * R);
  REQUIRE(std::isfinite(bound));
  REQUIRE(bound < 2.0);  // || Vdot || <= 1 here and ||R|| <= 1
}

TEST_CASE("commutator with a constant multiplier vanishes", "[hamiltonian]") {
  const Grid g(1, 10, 0.3, {0.0, 0.0});
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, 1.0);
  const RealVector theta = RealVector::Constant(10, 3.2);
  REQUIRE(max_abs(commutator_with_multiplier(H, theta)) == 0.0);
}

TEST_CASE("commutator with theta = x matches the discrete stencil identity",
          "[hamiltonian]") {
  // [H, x] on interior rows equals -hbar^2 (D2 x) - 2 i hbar (Dc x) P with
  // discrete derivatives; exact for a linear multiplier away from the walls.
  const Grid g(1, 20, 0.25, {0.25, 0.0});
  const double hbar = 0.7;
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, hbar);
  RealVector theta(20);
  for (int i = 0; i < 20; ++i) theta(i) = g.x(i);
  const Matrix C = commutator_with_multiplier(H, theta);

  const int n = 20;
  const double h = g.spacing;
  Matrix d2 = Matrix::Zero(n, n), dc = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    d2(i, i) = -2.0 / (h * h);
    if (i > 0) {
      d2(i, i - 1) = 1.0 / (h * h);
      dc(i, i - 1) = -0.5 / h;
    }
    if (i + 1 < n) {
      d2(i, i + 1) = 1.0 / (h * h);
      dc(i, i + 1) = 0.5 / h;
    }
  }
  const Vector th = theta.cast<Complex>();
  const Matrix momentum = -kI * hbar * dc;
  const Matrix oracle = -hbar * hbar * Matrix((d2 * th).asDiagonal()) -
                        2.0 * kI * hbar * Matrix((dc * th).asDiagonal()) * momentum;
  const double scale = max_abs(C);
  REQUIRE(max_abs((C - oracle).block(1, 0, n - 2, n)) <= 1e-12 * scale);
}

TEST_CASE("commutator support lives on the stencil dilation of grad theta",
          "[hamiltonian]") {
  const Grid g(1, 24, 0.25, {0.0, 0.0});
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(), zero_potential(),
                                   0.0, 1.0);
  RealVector theta = RealVector::Zero(24);
  for (int i = 10; i < 24; ++i) theta(i) = 1.0;  // step between 9 and 10
  const Matrix C = commutator_with_multiplier(H, theta);
  // chi = indicator of the stencil neighborhood of the step
  Matrix chi = Matrix::Zero(24, 24);
  for (int i = 8; i <= 11; ++i) chi(i, i) = 1.0;
  REQUIRE(max_abs(C * chi - C) == 0.0);
}

TEST_CASE("unit-vector probes confirm stencil locality of H", "[hamiltonian]") {
  const Grid g = Grid::dirichlet_2d(-1.0, 1.0, 9);
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(),
                                   PotentialFamily::time_independent([](double x, double y) {
                                     return x * y;
                                   }),
                                   0.0, 1.0);
  const int probe = g.flatten(4, 4);
  Vector e = Vector::Zero(g.size());
  e(probe) = 1.0;
  const Vector he = H.matrix * e;
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(he(i)) > 0.0) {
      const auto a = g.unflatten(i);
      const auto b = g.unflatten(probe);
      REQUIRE(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) <= 1);
    }
  }
}

TEST_CASE("restriction consistency: H psi = H_Omega psi strictly inside the mask",
          "[hamiltonian]") {
  const Grid g(1, 30, 0.2, {0.0, 0.0});
  const auto H = build_hamiltonian(g, VectorPotentialField::zero(),
                                   PotentialFamily::time_independent([](double x, double) {
                                     return std::cos(x);
                                   }),
                                   0.0, 0.8);
  DomainMask omega(g, "omega");
  for (int i = 8; i < 22; ++i) omega.in[i] = true;
  const auto Ho = restrict_dirichlet(H, omega);

  // psi supported one stencil inside omega
  Vector psi = Vector::Zero(g.size());
  for (int i = 9; i < 21; ++i) psi(i) = Complex(std::sin(0.3 * i), 0.2);
  const Vector full = H.matrix * psi;
  const Vector sub = Ho.embed(Ho.matrix * Ho.restrict(psi));
  for (int i : omega.indices()) REQUIRE(std::abs(full(i) - sub(i)) <= 1e-14);
}
