#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsplab/fields.hpp"
#include "nsplab/hamiltonian.hpp"
#include "nsplab/projection.hpp"
#include "nsplab/types.hpp"

namespace nsplab {

// Time-dependent Hermitian generator, exposed through its action so the
// stepper can stay matrix-free for stencil + low-rank structure.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual int dim() const = 0;
  virtual void prepare(double s) = 0;  // cache everything for this s
  virtual void apply(const Vector& in, Vector& out) const = 0;
  virtual double center() const = 0;   // spectral center estimate
  virtual double radius() const = 0;   // bound on max |lambda - center|
};

namespace prop_detail {

// rank-structured term sum_k coeff * L_k R_k^dagger applied to a vector
struct LowRankTerm {
  Complex coeff;
  Matrix left, right;
};

inline void add_lowrank(const std::vector<LowRankTerm>& terms, const Vector& in,
                        Vector& out) {
  for (const auto& t : terms) out.noalias() += t.coeff * (t.left * (t.right.adjoint() * in));
}

}  // namespace prop_detail

// i epsilon [Pdot, P] assembled from three frames of a ProjectionFamily via
// centered projector differences; Hermitian by construction and applied at
// O(N r) per product.
class NearAdiabaticCoupling {
 public:
  NearAdiabaticCoupling() = default;

  void prepare(const ProjectionFamily& family, double s, double fd_step, double epsilon,
               double s_lo = 0.0, double s_hi = 1.0) {
    const double h = fd_step;
    const double sc = std::min(std::max(s, s_lo + h), s_hi - h);
    const Matrix f0 = family.at(sc).frame;
    const Matrix fp = family.at(sc + h).frame;
    const Matrix fm = family.at(sc - h).frame;
    terms_.clear();
    const Complex pref = kI * epsilon / (2.0 * h);
    const Matrix mp = fp.adjoint() * f0;  // r x r overlaps
    const Matrix mm = fm.adjoint() * f0;
    // [Pdot, P] = (P+ P - P P+ - P- P + P P-) / 2h
    terms_.push_back({pref, fp * mp, f0});
    terms_.push_back({-pref, f0 * mp.adjoint(), fp});
    terms_.push_back({-pref, fm * mm, f0});
    terms_.push_back({pref, f0 * mm.adjoint(), fm});

    // exact norm of the rank-structured operator via an orthonormal basis
    // of the union of the frame spans
    Matrix stack(f0.rows(), f0.cols() + fp.cols() + fm.cols());
    stack << f0, fp, fm;
    Eigen::HouseholderQR<Matrix> qr(stack);
    const Matrix q = Matrix(qr.householderQ()).leftCols(std::min<int>(
        static_cast<int>(stack.cols()), static_cast<int>(stack.rows())));
    Matrix small = Matrix::Zero(q.cols(), q.cols());
    for (const auto& t : terms_)
      small += t.coeff * (q.adjoint() * t.left) * (t.right.adjoint() * q);
    norm_ = operator_norm(small);
  }

  void apply(const Vector& in, Vector& out) const {
    prop_detail::add_lowrank(terms_, in, out);
  }

  double norm() const { return norm_; }
  bool active() const { return !terms_.empty(); }
  void clear() { terms_.clear(); norm_ = 0.0; }

 private:
  std::vector<prop_detail::LowRankTerm> terms_;
  double norm_ = 0.0;
};

// (-i hbar grad - A)^2 + V(s) - E(s), applied through the 5/3-point stencil.
class StencilGenerator final : public Generator {
 public:
  StencilGenerator(const Grid& grid, const VectorPotentialField& A,
                   const PotentialFamily& V, double hbar,
                   std::function<double(double)> energy_shift = nullptr)
      : grid_(grid), potential_(V), hbar_(hbar), energy_shift_(std::move(energy_shift)) {
    const int n = grid.size();
    const double h = grid.spacing;
    kin_diag_ = 2.0 * grid.dimension * hbar * hbar / (h * h);
    a2_.resize(n);
    link_x_.resize(n);
    if (grid.dimension == 2) link_y_.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto c = grid.coords(i);
      double a2 = 0.0;
      for (int axis = 0; axis < grid.dimension; ++axis) {
        const double ai = A.eval(axis, c[0], c[1]);
        a2 += ai * ai;
      }
      a2_[i] = a2;
      link_x_[i] = detail::link_coupling(hbar, h, A.eval(0, c[0] + 0.5 * h, c[1]));
      if (grid.dimension == 2)
        link_y_[i] = detail::link_coupling(hbar, h, A.eval(1, c[0], c[1] + 0.5 * h));
    }
  }

  // optional near-adiabatic term i epsilon [Pdot, P]
  void attach_projection_family(const ProjectionFamily* family, double epsilon,
                                double fd_step) {
    family_ = family;
    epsilon_ = epsilon;
    fd_step_ = fd_step;
  }

  int dim() const override { return grid_.size(); }

  void prepare(double s) override {
    const int n = grid_.size();
    diag_.resize(n);
    const double shift = energy_shift_ ? energy_shift_(s) : 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const auto c = grid_.coords(i);
      diag_[i] = kin_diag_ + a2_[i] + potential_.eval(c[0], c[1], s) - shift;
      if (!std::isfinite(diag_[i])) throw NumericalError("generator: non-finite potential");
      double off = 2.0 * std::abs(link_x_[i]);
      const auto ij = grid_.unflatten(i);
      if (ij[0] == 0 || ij[0] + 1 == grid_.points_per_axis) off -= std::abs(link_x_[i]);
      if (grid_.dimension == 2) {
        off += 2.0 * std::abs(link_y_[i]);
        if (ij[1] == 0 || ij[1] + 1 == grid_.points_per_axis) off -= std::abs(link_y_[i]);
      }
      lo = std::min(lo, diag_[i] - off);
      hi = std::max(hi, diag_[i] + off);
    }
    center_ = 0.5 * (lo + hi);
    radius_ = 0.5 * (hi - lo);
    if (family_) {
      coupling_.prepare(*family_, s, fd_step_, epsilon_);
      radius_ += coupling_.norm();
    }
  }

  void apply(const Vector& in, Vector& out) const override {
    const int n = grid_.size();
    const int npa = grid_.points_per_axis;
    out.resize(n);
    for (int i = 0; i < n; ++i) out(i) = diag_[i] * in(i);
    if (grid_.dimension == 1) {
      for (int i = 0; i + 1 < n; ++i) {
        out(i) += link_x_[i] * in(i + 1);
        out(i + 1) += std::conj(link_x_[i]) * in(i);
      }
    } else {
      for (int iy = 0; iy < npa; ++iy) {
        for (int ix = 0; ix < npa; ++ix) {
          const int i = iy * npa + ix;
          if (ix + 1 < npa) {
            out(i) += link_x_[i] * in(i + 1);
            out(i + 1) += std::conj(link_x_[i]) * in(i);
          }
          if (iy + 1 < npa) {
            out(i) += link_y_[i] * in(i + npa);
            out(i + npa) += std::conj(link_y_[i]) * in(i);
          }
        }
      }
    }
    if (coupling_.active()) coupling_.apply(in, out);
  }

  double center() const override { return center_; }
  double radius() const override { return radius_; }

 private:
  Grid grid_;
  PotentialFamily potential_;
  double hbar_;
  std::function<double(double)> energy_shift_;
  double kin_diag_ = 0.0;
  std::vector<double> a2_;
  std::vector<Complex> link_x_, link_y_;
  std::vector<double> diag_;
  double center_ = 0.0, radius_ = 0.0;

  const ProjectionFamily* family_ = nullptr;
  double epsilon_ = 0.0, fd_step_ = 1e-3;
  NearAdiabaticCoupling coupling_;
};

// Dense generator from an arbitrary Hermitian matrix family; the small-system
// and oracle path.
class DenseGenerator final : public Generator {
 public:
  explicit DenseGenerator(std::function<Matrix(double)> builder,
                          const ProjectionFamily* family = nullptr,
                          double epsilon = 0.0, double fd_step = 1e-3)
      : builder_(std::move(builder)), family_(family), epsilon_(epsilon),
        fd_step_(fd_step) {}

  int dim() const override {
    require(dim_ >= 0, "DenseGenerator: prepare() before dim()");
    return dim_;
  }

  void prepare(double s) override {
    matrix_ = builder_(s);
    dim_ = static_cast<int>(matrix_.rows());
    if (family_) {
      coupling_.prepare(*family_, s, fd_step_, epsilon_);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim_; ++i) {
      double off = 0.0;
      for (int j = 0; j < dim_; ++j)
        if (j != i) off += std::abs(matrix_(i, j));
      lo = std::min(lo, std::real(matrix_(i, i)) - off);
      hi = std::max(hi, std::real(matrix_(i, i)) + off);
    }
    center_ = 0.5 * (lo + hi);
    radius_ = 0.5 * (hi - lo) + (family_ ? coupling_.norm() : 0.0);
  }

  void apply(const Vector& in, Vector& out) const override {
    out.noalias() = matrix_ * in;
    if (coupling_.active()) coupling_.apply(in, out);
  }

  double center() const override { return center_; }
  double radius() const override { return radius_; }

 private:
  std::function<Matrix(double)> builder_;
  const ProjectionFamily* family_ = nullptr;
  double epsilon_ = 0.0, fd_step_ = 1e-3;
  Matrix matrix_;
  NearAdiabaticCoupling coupling_;
  int dim_ = -1;
  double center_ = 0.0, radius_ = 0.0;
};

struct EvolveOptions {
  double phase_resolution = 0.5;  // ||G|| * ds / eps <= this
  int min_steps = 16;
  int max_taylor_terms = 40;
  bool full_unitary = false;      // accumulate U instead of one state
  int unitary_size_cap = 256;
};

struct EvolutionTrace {
  std::vector<double> s;
  std::vector<Vector> states;     // state mode
  std::vector<Matrix> unitaries;  // full-unitary mode
  std::string generator_tag;      // "true" | "near_adiabatic"
  double epsilon = 0.0;
  int steps = 0;
  double max_step_defect = 0.0;   // worst per-step norm increment
  double norm_drift = 0.0;        // | ||psi(end)|| - 1 |
};

namespace prop_detail {

// psi <- exp(-i dt (G - mu)) psi * exp(-i dt mu), Taylor in the shifted
// generator. With radius * |dt| <= phase_resolution the series reaches
// machine precision well inside the term cap, so each step applies the
// midpoint exponential exactly.
template <typename ApplyFn>
void apply_exponential(const ApplyFn& apply_shifted, Complex phase_step, Vector& psi,
                       Vector& term, Vector& scratch, int max_terms) {
  term = psi;
  double psi_scale = psi.norm();
  for (int k = 1; k <= max_terms; ++k) {
    apply_shifted(term, scratch);
    term = (phase_step / static_cast<double>(k)) * scratch;
    psi += term;
    const double tn = term.norm();
    if (tn <= 1e-17 * psi_scale) return;
  }
  throw NumericalError("evolve: Taylor expansion of the step exponential did not converge");
}

}  // namespace prop_detail

// Exponential-midpoint integration of i eps dpsi/ds = G(s) psi across the
// checkpoint grid. Steps are uniform and chosen from the fast-phase rule.
inline EvolutionTrace evolve(Generator& gen, double epsilon,
                             const std::vector<double>& checkpoints, const Vector& psi0,
                             const std::string& tag, const EvolveOptions& opt = {}) {
  require(epsilon > 0.0, "evolve: epsilon must be positive");
  require(checkpoints.size() >= 2, "evolve: need at least [s0, s1]");
  for (size_t i = 1; i < checkpoints.size(); ++i)
    require(checkpoints[i] > checkpoints[i - 1], "evolve: checkpoints must increase");
  const double s0 = checkpoints.front(), s1 = checkpoints.back();

  // conservative generator norm over the sweep
  double bound = 0.0;
  for (double sp : checkpoints) {
    gen.prepare(sp);
    bound = std::max(bound, std::abs(gen.center()) + gen.radius());
  }
  const int steps = std::max(
      opt.min_steps,
      static_cast<int>(std::ceil((s1 - s0) * bound / (opt.phase_resolution * epsilon))));
  const double ds = (s1 - s0) / steps;

  const int n = gen.dim();
  const bool full = opt.full_unitary;
  if (full)
    require(n <= opt.unitary_size_cap,
            "evolve: full-unitary mode capped at " + std::to_string(opt.unitary_size_cap));

  EvolutionTrace trace;
  trace.generator_tag = tag;
  trace.epsilon = epsilon;
  trace.steps = steps;

  Vector psi = psi0;
  Matrix u;
  if (full) u = Matrix::Identity(n, n);

  size_t next_checkpoint = 0;
  auto record = [&](double s_now) {
    trace.s.push_back(s_now);
    if (full)
      trace.unitaries.push_back(u);
    else
      trace.states.push_back(psi);
  };
  if (checkpoints[0] == s0) {
    record(s0);
    next_checkpoint = 1;
  }

  Vector term(n), scratch(n);
  double prev_norm = full ? 1.0 : psi.norm();
  for (int k = 0; k < steps; ++k) {
    const double s_mid = s0 + (k + 0.5) * ds;
    gen.prepare(s_mid);
    const double mu = gen.center();
    const Complex c = -kI * ds / epsilon;
    auto apply_shifted = [&](const Vector& in, Vector& out) {
      gen.apply(in, out);
      out -= mu * in;
    };
    const Complex mu_phase = std::exp(c * mu);
    if (!full) {
      prop_detail::apply_exponential(apply_shifted, c, psi, term, scratch,
                                     opt.max_taylor_terms);
      psi *= mu_phase;
      const double nn = psi.norm();
      trace.max_step_defect = std::max(trace.max_step_defect, std::abs(nn - prev_norm));
      prev_norm = nn;
    } else {
      for (int col = 0; col < n; ++col) {
        Vector v = u.col(col);
        prop_detail::apply_exponential(apply_shifted, c, v, term, scratch,
                                       opt.max_taylor_terms);
        u.col(col) = mu_phase * v;
      }
      if ((k & 31) == 0 || k + 1 == steps) {
        const double defect = max_abs(u.adjoint() * u - Matrix::Identity(n, n));
        trace.max_step_defect = std::max(trace.max_step_defect, defect);
      }
    }
    const double s_now = s0 + (k + 1) * ds;
    while (next_checkpoint < checkpoints.size() &&
           checkpoints[next_checkpoint] <= s_now + 0.5 * ds) {
      record(s_now);
      ++next_checkpoint;
    }
  }
  trace.norm_drift = full ? trace.max_step_defect : std::abs(prev_norm - 1.0);
  if (!std::isfinite(trace.norm_drift)) throw NumericalError("evolve: state is not finite");
  return trace;
}

// dist(psi, Range P) = ||(I - P) psi||.
inline double adiabatic_distance(const Vector& psi, const ProjectionFrame& p) {
  require(std::abs(psi.norm() - 1.0) <= 1e-6, "adiabatic_distance: state not normalized");
  const Vector overlap = p.frame.adjoint() * psi;
  const double inside = overlap.squaredNorm();
  return std::sqrt(std::max(0.0, psi.squaredNorm() - inside));
}

// || U_n(s)^* P(s) U_n(s) - P(0) || along a full-unitary trace.
inline std::vector<double> intertwining_defect(const EvolutionTrace& trace,
                                               const ProjectionFamily& family) {
  require(!trace.unitaries.empty(),
          "intertwining_defect: trace must be recorded in full-unitary mode");
  const Matrix p0 = family.at(trace.s.front()).projector();
  std::vector<double> out;
  out.reserve(trace.s.size());
  for (size_t k = 0; k < trace.s.size(); ++k) {
    const Matrix& u = trace.unitaries[k];
    const Matrix conj = u.adjoint() * family.at(trace.s[k]).projector() * u;
    out.push_back(operator_norm(conj - p0));
  }
  return out;
}

}  // namespace nsplab
