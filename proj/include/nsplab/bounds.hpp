#pragma once

#include <cmath>

#include "nsplab/types.hpp"

namespace nsplab {

// Measured inputs and the assembled right-hand sides of the two distance
// bounds, all with the C = 1 convention for the generic constants.
struct BoundComponents {
  // inputs
  double delta = 0.0;
  double delta_prime = 0.0;
  double g3 = 0.0, g4 = 0.0, g5 = 0.0;  // |||g_a|||_{3,4,5}
  double max_pdot = 0.0, max_pddot = 0.0;
  double a = 0.0;
  double epsilon = 0.0;
  // assembled constants
  double K_a = 0.0;
  double K_tilde_a = 0.0;
  // additive terms of the nearly-spectral bound
  double term_two_delta_prime = 0.0;
  double term_coupling = 0.0;        // 2 ||Pdot|| |||g|||_3 delta
  double term_Ka_eps = 0.0;
  double term_delta_over_eps = 0.0;
  double term_delta_over_a2 = 0.0;   // smooth variant only
  double term_Kta_eps = 0.0;         // smooth variant only
  // totals
  double rhs_main = 0.0;
  double rhs_main_smooth = 0.0;

  std::string norm_convention = "C=1";
};

inline BoundComponents assemble_bounds(double delta, double delta_prime, double g3,
                                       double g4, double g5, double max_pdot,
                                       double max_pddot, double a, double epsilon) {
  require(epsilon > 0.0, "assemble_bounds: epsilon must be positive");
  require(a > 0.0 && a < 1.0, "assemble_bounds: a must lie in (0,1)");
  require(delta >= 0.0 && delta_prime >= 0.0, "assemble_bounds: negative input");
  BoundComponents b;
  b.delta = delta;
  b.delta_prime = delta_prime;
  b.g3 = g3;
  b.g4 = g4;
  b.g5 = g5;
  b.max_pdot = max_pdot;
  b.max_pddot = max_pddot;
  b.a = a;
  b.epsilon = epsilon;

  b.K_a = 2.0 * g3 * max_pdot * max_pdot + 2.0 * g3 * max_pdot +
          (g3 * max_pddot + g4 * max_pdot);
  b.K_tilde_a = g5 + g4 * max_pdot + (1.0 + max_pdot) / (a * a);

  b.term_two_delta_prime = 2.0 * delta_prime;
  b.term_coupling = 2.0 * max_pdot * g3 * delta;
  b.term_Ka_eps = b.K_a * epsilon;
  b.term_delta_over_eps = delta / epsilon;
  b.term_delta_over_a2 = delta / (a * a);
  b.term_Kta_eps = b.K_tilde_a * epsilon;

  b.rhs_main = b.term_two_delta_prime + b.term_coupling + b.term_Ka_eps +
               b.term_delta_over_eps;
  b.rhs_main_smooth = b.term_two_delta_prime + b.term_coupling +
                      b.term_delta_over_a2 + b.term_Kta_eps + b.term_delta_over_eps;
  return b;
}

// epsilon* = sqrt(delta / K_a): the minimizer of K_a eps + delta/eps.
inline double optimal_epsilon(const BoundComponents& b) {
  require(b.K_a > 0.0, "optimal_epsilon: K_a must be positive");
  return std::sqrt(b.delta / b.K_a);
}

}  // namespace nsplab
