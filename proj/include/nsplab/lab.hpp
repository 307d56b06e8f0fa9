#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "nsplab/bounds.hpp"
#include "nsplab/harness.hpp"
#include "nsplab/parallel.hpp"
#include "nsplab/projection.hpp"
#include "nsplab/propagator.hpp"
#include "nsplab/scenarios.hpp"
#include "nsplab/triple_norm.hpp"

namespace nsplab {

// ---------------------------------------------------------------------------
// per-(scenario, hbar) measurement bundle

struct ScenarioMeasurement {
  double hbar = 0.0;
  double a = 0.0;
  double gap = 0.0;           // min spectral gap along the track
  double delta = 0.0;
  double delta_smooth = 0.0;
  double delta_prime = 0.0;
  double g3 = 0.0, g4 = 0.0, g5 = 0.0;
  double max_pdot = 0.0, max_pddot = 0.0;
  double closeness0 = 0.0;    // max_s ||P_Omega - P||
  double interior_mass = 1.0; // min over frame columns of ||chi_Itilde psi||
  double sobolev_22 = 0.0;
  int grid_points = 0;
  std::string convention = "C=1";
};

struct AruleConfig {
  bool half_gap = true;   // a = gap/2 (par_val); otherwise fixed value
  double fixed_value = 0.3;
  double cap = 0.95;      // keep a inside (0,1)
};

inline double resolve_a(const AruleConfig& rule, double gap) {
  const double a = rule.half_gap ? 0.5 * gap : rule.fixed_value;
  return std::min(a, rule.cap);
}

// Builders shared by sweeps and the CLI: exact per-s construction of
// P_Omega(s) and P(s) for a realized lattice scenario.
struct ScenarioProjections {
  RealizedScenario realized;
  CutoffField cutoff;
  std::shared_ptr<ProjectionFamily> p_omega_family;
  std::shared_ptr<ProjectionFamily> p_family;

  ProjectionFrame p_omega_at(double s) const { return p_omega_family->at(s); }
  ProjectionFrame p_at(double s) const { return p_family->at(s); }
};

inline ScenarioProjections make_projections(const RealizedScenario& rs) {
  ScenarioProjections sp;
  sp.realized = rs;
  const bool spectral = rs.spec.spectral_control;
  if (!spectral) sp.cutoff = build_cutoff(rs.omega, rs.spec.margin_c, rs.grid);

  auto p_omega_builder = [rs](double s) {
    const auto H_om = rs.h_omega(s);
    return build_interior_projection(H_om, rs.track.energy_at(s),
                                     0.9 * rs.track.gap_at(s));
  };
  sp.p_omega_family = std::make_shared<DirectProjectionFamily>(p_omega_builder);
  if (spectral) {
    sp.p_family = sp.p_omega_family;
  } else {
    const CutoffField cut = sp.cutoff;
    sp.p_family = std::make_shared<DirectProjectionFamily>(
        [p_omega_builder, cut](double s) {
          return build_nearly_spectral(p_omega_builder(s), cut);
        });
  }
  return sp;
}

inline std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

inline ScenarioMeasurement measure_scenario(const ScenarioProjections& sp,
                                            const AruleConfig& a_rule,
                                            const std::vector<double>& s_samples,
                                            double fd_step = 1e-3) {
  const RealizedScenario& rs = sp.realized;
  ScenarioMeasurement m;
  m.hbar = rs.hbar;
  m.grid_points = rs.grid.size();
  m.gap = rs.track.min_gap;
  m.a = resolve_a(a_rule, m.gap);
  const BumpFunction g = build_bump(m.a);
  m.g3 = triple_norm(g, 3);
  m.g4 = triple_norm(g, 4);
  m.g5 = triple_norm(g, 5);
  if (!rs.spec.spectral_control) m.sobolev_22 = sp.cutoff.sobolev_22;

  for (double s : s_samples) {
    const auto H = rs.h_full(s);
    const double E = rs.track.energy_at(s);
    const ProjectionFrame P = sp.p_at(s);
    m.delta = std::max(m.delta, delta_estimate(H, E, P));
    const Matrix p_dot = projector_derivative(*sp.p_family, s, 1, fd_step);
    const Matrix p_ddot = projector_derivative(*sp.p_family, s, 2, fd_step);
    m.max_pdot = std::max(m.max_pdot, operator_norm(p_dot));
    m.max_pddot = std::max(m.max_pddot, operator_norm(p_ddot));
    m.delta_prime = std::max(m.delta_prime, delta_prime_estimate(H, E, P, p_dot, g));
    if (!rs.spec.spectral_control) {
      m.closeness0 = std::max(
          m.closeness0, operator_norm(sp.p_omega_at(s).projector() - P.projector()));
      // interior mass against I dilated by c/2
      const auto regions = rs.regions_at(s);
      DomainMask itilde(rs.grid, "I_tilde");
      const RealVector dist_i = distance_to_mask(regions.I);
      for (int i = 0; i < rs.grid.size(); ++i)
        itilde.in[i] = dist_i(i) <= 0.5 * rs.spec.margin_c;
      const Matrix chi = itilde.indicator().cast<Complex>().asDiagonal();
      for (int ccol = 0; ccol < P.rank(); ++ccol)
        m.interior_mass =
            std::min(m.interior_mass, (chi * P.frame.col(ccol)).norm());
    }
  }

  auto h_family = [&rs](double s) { return rs.h_full(s); };
  auto e_family = [&rs](double s) { return rs.track.energy_at(s); };
  m.delta_smooth =
      delta_smooth_estimate(h_family, e_family, *sp.p_family, s_samples, fd_step);
  return m;
}

// ---------------------------------------------------------------------------
// epsilon sweep

struct EpsilonSweepPoint {
  double epsilon = 0.0;
  double dist_final = 0.0;
  double dist_max = 0.0;
  double norm_drift = 0.0;
  int steps = 0;
  BoundComponents bounds;
  bool within_envelope = false;  // dist_max <= 10 * rhs_main
};

struct EpsilonSweepResult {
  ScenarioMeasurement measurement;
  std::vector<EpsilonSweepPoint> points;
  std::vector<double> halving_ratios;  // dist_final(eps/2) / dist_final(eps)
  double eps_star_measured = 0.0;      // ladder argmin of dist_max
  double eps_star_formula = 0.0;       // sqrt(delta / K_a)
  bool u_shape_detected = false;
};

// Runs the true evolution for each epsilon and compares distances against
// the assembled Theorem-1 envelope.
inline EpsilonSweepResult epsilon_sweep(Generator& true_generator,
                                        const ProjectionFamily& family,
                                        const ScenarioMeasurement& m,
                                        const std::vector<double>& epsilon_ladder,
                                        const std::vector<double>& checkpoints,
                                        int rank_column = 0) {
  EpsilonSweepResult out;
  out.measurement = m;

  // checkpoint frames are epsilon-independent
  std::vector<ProjectionFrame> frames;
  frames.reserve(checkpoints.size());
  for (double s : checkpoints) frames.push_back(family.at(s));

  Vector psi0 = frames.front().frame.col(rank_column);
  psi0.normalize();

  for (double eps : epsilon_ladder) {
    const EvolutionTrace trace = evolve(true_generator, eps, checkpoints, psi0, "true");
    EpsilonSweepPoint pt;
    pt.epsilon = eps;
    pt.steps = trace.steps;
    pt.norm_drift = trace.norm_drift;
    for (size_t k = 0; k < trace.states.size(); ++k) {
      Vector psi = trace.states[k];
      psi.normalize();
      const double d = adiabatic_distance(psi, frames[k]);
      pt.dist_max = std::max(pt.dist_max, d);
      if (k + 1 == trace.states.size()) pt.dist_final = d;
    }
    pt.bounds = assemble_bounds(m.delta, m.delta_prime, m.g3, m.g4, m.g5, m.max_pdot,
                                m.max_pddot, m.a, eps);
    pt.within_envelope = pt.dist_max <= 10.0 * pt.bounds.rhs_main;
    out.points.push_back(pt);
  }

  for (size_t k = 0; k + 1 < out.points.size(); ++k)
    out.halving_ratios.push_back(out.points[k + 1].dist_final /
                                 std::max(out.points[k].dist_final, 1e-300));

  size_t argmin = 0;
  for (size_t k = 1; k < out.points.size(); ++k)
    if (out.points[k].dist_max < out.points[argmin].dist_max) argmin = k;
  out.eps_star_measured = out.points[argmin].epsilon;
  out.eps_star_formula = optimal_epsilon(out.points.front().bounds);
  // decreasing at the large-epsilon end, not decreasing at the small end
  if (out.points.size() >= 3) {
    const bool large_end_decreasing = out.points[1].dist_max < out.points[0].dist_max;
    const bool floor_reached =
        out.points.back().dist_max >= out.points[argmin].dist_max * (1.0 - 1e-12) &&
        argmin + 1 < out.points.size();
    out.u_shape_detected = large_end_decreasing && floor_reached;
  }
  return out;
}

// ---------------------------------------------------------------------------
// hbar sweep

struct HbarSweepPoint {
  ScenarioMeasurement m;
  double ratio_dprime_scaling = 0.0;  // delta' / (delta * g4 / gap)
};

struct HbarSweepResult {
  std::vector<HbarSweepPoint> points;
  DecayFit fit_delta, fit_delta_prime, fit_closeness;
  double dprime_ratio_spread = 0.0;  // max/min of the scaling ratio
};

inline HbarSweepResult hbar_sweep(const ScenarioSpec& spec,
                                  const std::vector<double>& hbar_ladder,
                                  const AruleConfig& a_rule,
                                  const std::vector<double>& s_samples,
                                  int refinement = 1, int workers = 1) {
  HbarSweepResult out;
  auto job = [&](int i) -> HbarSweepPoint {
    const auto rs = realize(spec, hbar_ladder[i], refinement);
    const auto sp = make_projections(rs);
    HbarSweepPoint pt;
    pt.m = measure_scenario(sp, a_rule, s_samples);
    pt.ratio_dprime_scaling =
        pt.m.delta_prime / std::max(pt.m.delta * pt.m.g4 / pt.m.gap, 1e-300);
    return pt;
  };
  out.points = parallel_map_indexed<HbarSweepPoint>(
      static_cast<int>(hbar_ladder.size()), workers, job);

  std::vector<double> inv_h, deltas, dprimes, closeness;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const auto& pt : out.points) {
    inv_h.push_back(1.0 / pt.m.hbar);
    deltas.push_back(pt.m.delta);
    dprimes.push_back(pt.m.delta_prime);
    closeness.push_back(pt.m.closeness0);
    rmin = std::min(rmin, pt.ratio_dprime_scaling);
    rmax = std::max(rmax, pt.ratio_dprime_scaling);
  }
  out.fit_delta = fit_log_linear(inv_h, deltas);
  out.fit_delta_prime = fit_log_linear(inv_h, dprimes);
  if (!spec.spectral_control) out.fit_closeness = fit_log_linear(inv_h, closeness);
  out.dprime_ratio_spread = rmax / std::max(rmin, 1e-300);
  return out;
}

}  // namespace nsplab
