#pragma once

#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "nsplab/types.hpp"

namespace nsptest {

// Deterministic random Hermitian matrix with entries O(1).
inline nsplab::Matrix random_hermitian(int n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nsplab::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nsplab::Complex(u(rng), u(rng));
  m = (0.5 * scale) * (m + m.adjoint()).eval();
  return m;
}

// Hermitian matrix with prescribed eigenvalues and a random deterministic basis.
inline nsplab::Matrix hermitian_with_spectrum(const nsplab::RealVector& eigs,
                                              unsigned seed) {
  const int n = static_cast<int>(eigs.size());
  nsplab::Matrix a = random_hermitian(n, seed);
  Eigen::SelfAdjointEigenSolver<nsplab::Matrix> es(a);
  const nsplab::Matrix q = es.eigenvectors();
  return q * eigs.asDiagonal() * q.adjoint();
}

inline nsplab::Vector random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nsplab::Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = nsplab::Complex(u(rng), u(rng));
  v.normalize();
  return v;
}

}  // namespace nsptest
