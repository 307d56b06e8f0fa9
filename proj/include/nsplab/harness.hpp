#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsplab/bounds.hpp"
#include "nsplab/bump.hpp"
#include "nsplab/cutoff.hpp"
#include "nsplab/eigen_calculus.hpp"
#include "nsplab/hamiltonian.hpp"
#include "nsplab/projection.hpp"
#include "nsplab/propagator.hpp"
#include "nsplab/scenarios.hpp"
#include "nsplab/triple_norm.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// ---------------------------------------------------------------------------
// log-linear decay fits

struct DecayFit {
  double slope = 0.0;      // fitted d(log y)/dx; decay means slope < 0
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> x;
  std::vector<double> log_y;
};

inline DecayFit fit_log_linear(const std::vector<double>& x,
                               const std::vector<double>& y) {
  require(x.size() == y.size(), "fit_log_linear: size mismatch");
  require(x.size() >= 4, "fit_log_linear: decay fits need at least 4 points");
  DecayFit f;
  f.x = x;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    require(y[i] > 0.0, "fit_log_linear: nonpositive ordinate");
    const double ly = std::log(y[i]);
    f.log_y.push_back(ly);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, "fit_log_linear: degenerate abscissa");
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double fit = f.intercept + f.slope * x[i];
    ss_res += (f.log_y[i] - fit) * (f.log_y[i] - fit);
    ss_tot += (f.log_y[i] - mean_y) * (f.log_y[i] - mean_y);
  }
  f.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return f;
}

// ---------------------------------------------------------------------------
// geometric resolvent identity (exact discrete algebra)

struct GeometricResolventResult {
  double residual_rel_1 = 0.0;  // identity without the right cutoff
  double residual_rel_2 = 0.0;  // chi_L1 R_Omega chi_L2 version
};

// chi_L1 (H_Omega - z)^{-1} = chi_L1 (H_Lambda - z)^{-1} Theta
//                           + chi_L1 (H_Lambda - z)^{-1} [H, Theta] (H_Omega - z)^{-1}
// The support hypotheses are checked on the stencil-dilated sets before any
// solve; violations abort with the named precondition.
inline GeometricResolventResult geometric_resolvent_check(
    const DiscreteHamiltonian& H, const DiscreteHamiltonian& H_lambda,
    const DiscreteHamiltonian& H_omega, const RealVector& theta,
    const DomainMask& lambda1, const DomainMask& lambda2, Complex z) {
  const Grid& grid = H.grid();
  require(theta.size() == grid.size(), "geometric_resolvent: theta size mismatch");
  const DomainMask& lambda = H_lambda.domain;
  const DomainMask& omega = H_omega.domain;

  auto dilate = [&](const DomainMask& m) {
    DomainMask out = m;
    for (int i : m.indices())
      for (int nb : grid.neighbors(i)) out.in[nb] = true;
    return out;
  };
  // Theta == 1 on a stencil neighborhood of Lambda1 u Lambda2
  const DomainMask near_targets = dilate(lambda1.unite(lambda2));
  for (int i : near_targets.indices())
    if (theta(i) != 1.0)
      throw PreconditionError(
          "geometric_resolvent: Theta != 1 on the neighborhood of Lambda1 u Lambda2");
  // Theta == 0 on a stencil neighborhood of Lambda^c
  const DomainMask near_complement = dilate(lambda.complement());
  for (int i : near_complement.indices())
    if (theta(i) != 0.0)
      throw PreconditionError(
          "geometric_resolvent: Theta not supported inside Lambda");
  for (int i = 0; i < grid.size(); ++i) {
    require(!lambda1.in[i] || lambda.in[i], "geometric_resolvent: Lambda1 not in Lambda");
    require(!lambda2.in[i] || lambda.in[i], "geometric_resolvent: Lambda2 not in Lambda");
    require(!lambda.in[i] || omega.in[i], "geometric_resolvent: Lambda not in Omega");
  }

  auto embedded_resolvent = [&](const DiscreteHamiltonian& hr) {
    const int m = hr.size();
    const Matrix r = (hr.matrix - z * Matrix::Identity(m, m)).partialPivLu().inverse();
    return hr.embed_columns(r) * hr.embed_columns(Matrix::Identity(m, m)).adjoint();
  };
  const Matrix r_omega = embedded_resolvent(H_omega);
  const Matrix r_lambda = embedded_resolvent(H_lambda);
  const Matrix comm = commutator_with_multiplier(H, theta);

  const Matrix chi1 = lambda1.indicator().cast<Complex>().asDiagonal();
  const Matrix chi2 = lambda2.indicator().cast<Complex>().asDiagonal();
  const Matrix theta_diag = theta.cast<Complex>().asDiagonal();

  const Matrix lhs1 = chi1 * r_omega;
  const Matrix rhs1 = chi1 * r_lambda * theta_diag + chi1 * r_lambda * comm * r_omega;
  const double scale1 = std::max(operator_norm(lhs1), 1e-300);
  GeometricResolventResult out;
  out.residual_rel_1 = operator_norm(lhs1 - rhs1) / scale1;

  const Matrix lhs2 = lhs1 * chi2;
  const Matrix rhs2 = chi1 * r_lambda * chi2 + chi1 * r_lambda * comm * r_omega * chi2;
  const double scale2 = std::max(operator_norm(lhs2), scale1 * 1e-8);
  out.residual_rel_2 = operator_norm(lhs2 - rhs2) / scale2;
  return out;
}

// ---------------------------------------------------------------------------
// Combes-Thomas decay through the forbidden region

struct CtPoint {
  DiscreteHamiltonian H_J;   // Dirichlet restriction to J
  RealVector v_on_J;         // potential samples on the J points
  DomainMask Ji, Jj;         // probe subsets of J (full-grid masks)
  double E = 0.0;
  double b = 0.0;
  double separation_required = 0.0;  // c/2
};

struct CombesThomasResult {
  std::vector<double> hbars;
  std::vector<double> norms;
  DecayFit fit;  // log norm vs 1/hbar
};

inline double ct_norm(const CtPoint& pt, Complex z) {
  require(std::abs(z - pt.E) < 0.5 * pt.b, "combes_thomas: |E - z| must be < b/2");
  for (int i = 0; i < pt.v_on_J.size(); ++i)
    require(pt.v_on_J(i) > pt.E + pt.b, "combes_thomas: V <= E + b somewhere on J");
  require(mask_distance(pt.Ji, pt.Jj) >= pt.separation_required,
          "combes_thomas: probe sets not separated by c/2");
  const int m = pt.H_J.size();
  const Matrix r = (pt.H_J.matrix - z * Matrix::Identity(m, m)).partialPivLu().inverse();
  const Matrix r_embedded =
      pt.H_J.embed_columns(r) * pt.H_J.embed_columns(Matrix::Identity(m, m)).adjoint();
  const Matrix chi_i = pt.Ji.indicator().cast<Complex>().asDiagonal();
  const Matrix chi_j = pt.Jj.indicator().cast<Complex>().asDiagonal();
  return operator_norm(chi_i * r_embedded * chi_j);
}

inline CombesThomasResult combes_thomas_check(
    const std::function<CtPoint(double)>& builder, const std::vector<double>& hbar_ladder,
    Complex z_offset = Complex(0, 0)) {
  CombesThomasResult out;
  std::vector<double> inv_h;
  for (double hb : hbar_ladder) {
    const CtPoint pt = builder(hb);
    out.hbars.push_back(hb);
    out.norms.push_back(ct_norm(pt, pt.E + z_offset));
    inv_h.push_back(1.0 / hb);
  }
  out.fit = fit_log_linear(inv_h, out.norms);
  return out;
}

// ---------------------------------------------------------------------------
// exponential bounds for the interior spectral projection

struct ProjectionDecayPoint {
  double hbar = 0.0;
  double norm_fp = 0.0;         // ||F P_Omega||
  double norm_fpdot = 0.0;      // ||F Pdot_Omega||
  double norm_comm = 0.0;       // ||[H_Omega, F] P_Omega||
  double norm_resolvent = 0.0;  // ||F (H_Omega - z)^{-1} chi_Itilde||
  double interior_mass = 0.0;   // min_i ||chi_Itilde psi_i||
  double control_norm = 0.0;    // ||F_control P_Omega||, expected O(1)
};

struct ProjectionDecayResult {
  std::vector<ProjectionDecayPoint> points;
  DecayFit fit_fp, fit_fpdot, fit_comm, fit_resolvent;
};

struct ProjectionDecayInputs {
  DiscreteHamiltonian H_omega;
  ProjectionFrame p_omega;      // full-grid frame
  Matrix p_dot;                 // full-grid dP_Omega/ds
  RealVector F;                 // vanishes away from the boundary collar
  RealVector F_control;         // supported inside I; the non-decaying control
  DomainMask I_tilde;
  double E = 0.0;
  Complex z;                    // |z - E| < gap/2
};

inline ProjectionDecayPoint projection_decay_point(const ProjectionDecayInputs& in,
                                                   double hbar) {
  ProjectionDecayPoint pt;
  pt.hbar = hbar;
  const Matrix fd = in.F.cast<Complex>().asDiagonal();
  pt.norm_fp = thin_norm(fd * in.p_omega.frame);
  pt.norm_fpdot = operator_norm(fd * in.p_dot);
  // [H_Omega, F] P_Omega evaluated on the Omega block
  const Matrix comm = commutator_with_multiplier(in.H_omega, in.F);
  const Matrix frame_on_omega = [&] {
    const auto idx = in.H_omega.domain.indices();
    Matrix f(idx.size(), in.p_omega.rank());
    for (size_t k = 0; k < idx.size(); ++k) f.row(static_cast<int>(k)) = in.p_omega.frame.row(idx[k]);
    return f;
  }();
  pt.norm_comm = thin_norm(comm * frame_on_omega);
  const int m = in.H_omega.size();
  const Matrix r =
      (in.H_omega.matrix - in.z * Matrix::Identity(m, m)).partialPivLu().inverse();
  const Matrix r_embedded =
      in.H_omega.embed_columns(r) * in.H_omega.embed_columns(Matrix::Identity(m, m)).adjoint();
  const Matrix chi_it = in.I_tilde.indicator().cast<Complex>().asDiagonal();
  pt.norm_resolvent = operator_norm(fd * r_embedded * chi_it);
  double mass = std::numeric_limits<double>::infinity();
  for (int c = 0; c < in.p_omega.rank(); ++c)
    mass = std::min(mass, (chi_it * in.p_omega.frame.col(c)).norm());
  pt.interior_mass = mass;
  const Matrix fc = in.F_control.cast<Complex>().asDiagonal();
  pt.control_norm = thin_norm(fc * in.p_omega.frame);
  return pt;
}

inline ProjectionDecayResult projection_decay_check(
    const std::function<ProjectionDecayInputs(double)>& builder,
    const std::vector<double>& hbar_ladder) {
  ProjectionDecayResult out;
  std::vector<double> inv_h, fp, fpd, cm, rs;
  for (double hb : hbar_ladder) {
    const auto in = builder(hb);
    // the lemma hypothesis: F vanishes off the collar, checked against I_tilde
    for (int i : in.I_tilde.indices())
      require(in.F(i) == 0.0, "projection_decay: F does not vanish on I_tilde");
    out.points.push_back(projection_decay_point(in, hb));
    inv_h.push_back(1.0 / hb);
    fp.push_back(out.points.back().norm_fp);
    fpd.push_back(out.points.back().norm_fpdot);
    cm.push_back(out.points.back().norm_comm);
    rs.push_back(out.points.back().norm_resolvent);
  }
  out.fit_fp = fit_log_linear(inv_h, fp);
  out.fit_fpdot = fit_log_linear(inv_h, fpd);
  out.fit_comm = fit_log_linear(inv_h, cm);
  out.fit_resolvent = fit_log_linear(inv_h, rs);
  return out;
}

}  // namespace nsplab
