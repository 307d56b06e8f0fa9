#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsplab/contour.hpp"
#include "nsplab/cutoff.hpp"
#include "nsplab/eigen_calculus.hpp"
#include "nsplab/hamiltonian.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Orthonormal frame spanning Range P, stored on the full grid (restricted
// eigenvectors are extended by zero). P itself is frame * frame^dagger.
struct ProjectionFrame {
  Matrix frame;        // N x r
  std::string parent;  // "P_Omega" | "P" | free-form
  double energy = 0.0;
  double s = 0.0;

  int rank() const { return static_cast<int>(frame.cols()); }
  int ambient() const { return static_cast<int>(frame.rows()); }
  Matrix projector() const { return frame * frame.adjoint(); }

  double orthonormality_defect() const {
    const Matrix g = frame.adjoint() * frame;
    return max_abs(g - Matrix::Identity(g.rows(), g.cols()));
  }

  Vector apply(const Vector& v) const { return frame * (frame.adjoint() * v); }
};

// Spectral projection of H_Omega onto the eigenvalue cluster inside
// |lambda - E| < Delta/2, extended by zero to the whole box.
inline ProjectionFrame build_interior_projection(const DiscreteHamiltonian& H_omega,
                                                 double E, double gap) {
  require(gap > 0.0, "build_interior_projection: gap must be positive");
  const auto ed = eigensolve(H_omega);
  std::vector<int> cluster;
  for (int i = 0; i < ed.size(); ++i)
    if (std::abs(ed.eigenvalues(i) - E) < 0.5 * gap) cluster.push_back(i);
  require(!cluster.empty(), "build_interior_projection: no eigenvalue near E");
  double sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ed.size(); ++i) {
    if (std::abs(ed.eigenvalues(i) - E) < 0.5 * gap) continue;
    for (int j : cluster) sep = std::min(sep, std::abs(ed.eigenvalues(i) - ed.eigenvalues(j)));
  }
  if (sep < gap * (1.0 - 1e-12))
    throw PreconditionError("build_interior_projection: gap violation, separation " +
                            std::to_string(sep) + " < " + std::to_string(gap));

  Matrix cols(ed.eigenvectors.rows(), cluster.size());
  double e_mean = 0.0;
  for (size_t k = 0; k < cluster.size(); ++k) {
    cols.col(static_cast<int>(k)) = ed.eigenvectors.col(cluster[k]);
    e_mean += ed.eigenvalues(cluster[k]);
  }
  e_mean /= static_cast<double>(cluster.size());

  ProjectionFrame out;
  out.frame = H_omega.embed_columns(cols);
  out.parent = "P_Omega";
  out.energy = e_mean;
  out.s = H_omega.s;
  return out;
}

// P(s): orthonormalized span of (I - chi) psi_i. The smallest singular value
// of the trimmed frame certifies that the cutoff did not eat the states.
inline ProjectionFrame build_nearly_spectral(const ProjectionFrame& p_omega,
                                             const CutoffField& chi,
                                             double min_singular = 1e-6) {
  require(p_omega.ambient() == chi.grid.size(),
          "build_nearly_spectral: frame/cutoff size mismatch");
  Matrix trimmed = p_omega.frame;
  for (int i = 0; i < trimmed.rows(); ++i) trimmed.row(i) *= (1.0 - chi.chi(i));
  Eigen::JacobiSVD<Matrix> svd(trimmed, Eigen::ComputeThinU);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin < min_singular)
    throw PreconditionError(
        "build_nearly_spectral: rank collapse, cutoff annihilates the frame "
        "(sigma_min " + std::to_string(smin) + ")");
  ProjectionFrame out;
  out.frame = svd.matrixU();
  out.parent = "P";
  out.energy = p_omega.energy;
  out.s = p_omega.s;
  return out;
}

// delta = 2 ||(H - E) P||, the measured nearly-spectral defect.
inline double delta_estimate(const DiscreteHamiltonian& H, double E,
                             const ProjectionFrame& P) {
  require(H.size() == P.ambient(), "delta_estimate: size mismatch");
  const Matrix m = H.matrix * P.frame - E * P.frame;
  return 2.0 * thin_norm(m);
}

// ---------------------------------------------------------------------------
// smooth families of projections

// Aligns F to the reference by the unitary polar factor of the overlap.
inline Matrix align_frames(const Matrix& reference, const Matrix& frame,
                           double min_overlap = 0.5) {
  const Matrix overlap = frame.adjoint() * reference;
  Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin < min_overlap)
    throw NumericalError("align_frames: frame rotation ambiguity, overlap " +
                         std::to_string(smin));
  return frame * (svd.matrixU() * svd.matrixV().adjoint());
}

class ProjectionFamily {
 public:
  virtual ~ProjectionFamily() = default;
  virtual ProjectionFrame at(double s) const = 0;
};

// Wraps an exact builder callback; every call re-solves.
class DirectProjectionFamily final : public ProjectionFamily {
 public:
  explicit DirectProjectionFamily(std::function<ProjectionFrame(double)> builder)
      : builder_(std::move(builder)) {}
  ProjectionFrame at(double s) const override { return builder_(s); }

 private:
  std::function<ProjectionFrame(double)> builder_;
};

// Coarse-grid family: frames are eigensolved on a uniform s-grid, gauge-
// aligned along it, and interpolated by cubic Hermite between nodes. The
// returned frame is re-orthonormalized, so downstream projector algebra is
// exact; interpolation only perturbs the subspace at O(step^4).
class InterpolatedProjectionFamily final : public ProjectionFamily {
 public:
  InterpolatedProjectionFamily(std::function<ProjectionFrame(double)> builder,
                               int coarse_intervals, double s_lo = 0.0,
                               double s_hi = 1.0)
      : s_lo_(s_lo), s_hi_(s_hi), n_(coarse_intervals) {
    require(n_ >= 4, "InterpolatedProjectionFamily: need at least 4 intervals");
    frames_.reserve(n_ + 1);
    energies_.resize(n_ + 1);
    for (int j = 0; j <= n_; ++j) {
      ProjectionFrame f = builder(node(j));
      if (j > 0) f.frame = align_frames(frames_[j - 1].frame, f.frame);
      energies_[j] = f.energy;
      frames_.push_back(std::move(f));
    }
    // centered differences in the aligned gauge; one-sided at the ends
    const double ds = (s_hi_ - s_lo_) / n_;
    derivs_.resize(n_ + 1);
    for (int j = 0; j <= n_; ++j) {
      if (j == 0)
        derivs_[j] = (-1.5 * frames_[0].frame + 2.0 * frames_[1].frame -
                      0.5 * frames_[2].frame) / ds;
      else if (j == n_)
        derivs_[j] = (1.5 * frames_[n_].frame - 2.0 * frames_[n_ - 1].frame +
                      0.5 * frames_[n_ - 2].frame) / ds;
      else
        derivs_[j] = (frames_[j + 1].frame - frames_[j - 1].frame) / (2.0 * ds);
    }
  }

  ProjectionFrame at(double s) const override {
    require(s >= s_lo_ - 1e-12 && s <= s_hi_ + 1e-12,
            "InterpolatedProjectionFamily: s outside the sampled range");
    const double ds = (s_hi_ - s_lo_) / n_;
    int j = std::min(n_ - 1, std::max(0, static_cast<int>((s - s_lo_) / ds)));
    const double t = (s - node(j)) / ds;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    Matrix raw = h00 * frames_[j].frame + (h10 * ds) * derivs_[j] +
                 h01 * frames_[j + 1].frame + (h11 * ds) * derivs_[j + 1];
    // restore orthonormality (polar factor of the interpolant)
    Eigen::JacobiSVD<Matrix> svd(raw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ProjectionFrame out;
    out.frame = svd.matrixU() * svd.matrixV().adjoint();
    out.parent = frames_[j].parent;
    out.energy = h00 * energies_[j] + h01 * energies_[j + 1] +
                 h10 * ds * deriv_energy(j) + h11 * ds * deriv_energy(j + 1);
    out.s = s;
    return out;
  }

  double energy(double s) const { return at(s).energy; }

 private:
  double node(int j) const { return s_lo_ + (s_hi_ - s_lo_) * j / n_; }
  double deriv_energy(int j) const {
    const double ds = (s_hi_ - s_lo_) / n_;
    if (j == 0) return (energies_[1] - energies_[0]) / ds;
    if (j == n_) return (energies_[n_] - energies_[n_ - 1]) / ds;
    return (energies_[j + 1] - energies_[j - 1]) / (2.0 * ds);
  }

  double s_lo_, s_hi_;
  int n_;
  std::vector<ProjectionFrame> frames_;
  std::vector<Matrix> derivs_;
  std::vector<double> energies_;
};

// ---------------------------------------------------------------------------
// finite-difference derivatives of projector families (gauge-free: they act
// on the projector matrices, never on frames)

inline Matrix projector_derivative(const ProjectionFamily& family, double s, int order,
                                   double fd_step, double s_lo = 0.0, double s_hi = 1.0) {
  require(order == 1 || order == 2, "projector_derivative: order must be 1 or 2");
  const double h = fd_step;
  require(h > 0.0, "projector_derivative: fd_step must be positive");
  double sc = std::min(std::max(s, s_lo + h), s_hi - h);
  const Matrix pm = family.at(sc - h).projector();
  const Matrix p0 = family.at(sc).projector();
  const Matrix pp = family.at(sc + h).projector();
  if (operator_norm(pp - pm) > 0.8)
    throw NumericalError("projector_derivative: family not continuous across fd stencil");
  if (order == 1) return (pp - pm) / (2.0 * h);
  return (pp - 2.0 * p0 + pm) / (h * h);
}

// d/ds[(H - E) P] at one s by centered differences, with a step-halving
// Richardson consistency check.
struct SmoothDefectSample {
  double value = 0.0;       // ||d/ds[(H-E)P]|| at the finer step
  double richardson = 0.0;  // relative step-halving disagreement
};

inline SmoothDefectSample smooth_defect_sample(
    const std::function<DiscreteHamiltonian(double)>& h_family,
    const std::function<double(double)>& e_family, const ProjectionFamily& p_family,
    double s, double fd_step, double s_lo = 0.0, double s_hi = 1.0) {
  auto shifted_product = [&](double t) -> Matrix {
    const DiscreteHamiltonian H = h_family(t);
    const ProjectionFrame P = p_family.at(t);
    return H.matrix * P.projector() - e_family(t) * P.projector();
  };
  auto deriv_norm = [&](double h) -> double {
    const double sc = std::min(std::max(s, s_lo + h), s_hi - h);
    return operator_norm((shifted_product(sc + h) - shifted_product(sc - h)) / (2.0 * h));
  };
  SmoothDefectSample out;
  const double coarse = deriv_norm(fd_step);
  out.value = deriv_norm(0.5 * fd_step);
  const double scale = std::max(out.value, 1e-14);
  out.richardson = std::abs(coarse - out.value) / scale;
  return out;
}

inline double delta_smooth_estimate(
    const std::function<DiscreteHamiltonian(double)>& h_family,
    const std::function<double(double)>& e_family, const ProjectionFamily& p_family,
    const std::vector<double>& s_grid, double fd_step, double richardson_tol = 0.1) {
  require(!s_grid.empty(), "delta_smooth_estimate: empty s grid");
  double worst = 0.0;
  for (double s : s_grid) {
    const auto sample =
        smooth_defect_sample(h_family, e_family, p_family, s, fd_step);
    if (sample.richardson > richardson_tol && sample.value > 1e-12)
      throw NumericalError(
          "delta_smooth_estimate: Richardson check failed at s=" + std::to_string(s) +
          " (rel " + std::to_string(sample.richardson) + "), fd_step too coarse");
    worst = std::max(worst, sample.value);
  }
  return 2.0 * worst;
}

// delta' = || g_a(H - E) Pdot P || through the eigensolve calculus.
inline double delta_prime_estimate(const DiscreteHamiltonian& H, double E,
                                   const ProjectionFrame& P, const Matrix& p_dot,
                                   const BumpFunction& g) {
  const auto ed = eigensolve(H);
  const Matrix gH = function_of_operator_eig(ed, E, [&](double x) { return g(x); });
  return thin_norm(gH * (p_dot * P.frame));
}

// ||d^n/ds^n (P_Omega - P)|| for n = 0,1,2 on a common s-grid.
struct ClosenessReport {
  std::vector<double> s;
  std::vector<double> norm0, norm1, norm2;
};

inline ClosenessReport closeness_check(const ProjectionFamily& p_omega,
                                       const ProjectionFamily& p,
                                       const std::vector<double>& s_grid,
                                       double fd_step) {
  ClosenessReport rep;
  for (double s : s_grid) {
    rep.s.push_back(s);
    rep.norm0.push_back(
        operator_norm(p_omega.at(s).projector() - p.at(s).projector()));
    rep.norm1.push_back(operator_norm(projector_derivative(p_omega, s, 1, fd_step) -
                                      projector_derivative(p, s, 1, fd_step)));
    rep.norm2.push_back(operator_norm(projector_derivative(p_omega, s, 2, fd_step) -
                                      projector_derivative(p, s, 2, fd_step)));
  }
  return rep;
}

// One (hbar, epsilon, a, s) measurement row of the nearly-spectral data.
struct DeltaReport {
  double delta = 0.0;
  double delta_smooth = 0.0;
  double delta_prime = 0.0;
  double a = 0.0;
  std::vector<double> s_grid;
  std::string norm_convention = "C=1";
};

}  // namespace nsplab
