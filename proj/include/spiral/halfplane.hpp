#pragma once

#include <array>
#include <vector>

#include "spiral/compat.hpp"
#include "spiral/kernels.hpp"
#include "spiral/modes.hpp"

namespace spiral {

struct AssembleOptions {
  int truncation = 0;           // 0 selects N automatically
  int max_truncation = 512;
  double truncation_rel_tol = 1e-10;
  double series_tail_tol = 1e-5;  // relative to Σ|φ_k|
  bool waive_mu_bound = false;    // accept μ ≥ (j01+1)² after per-mode resonance checks
  double resonance_tol = 1e-8;
  SeriesConfig series;
};

// v(x,y) = e^{αx}·Σ_{k≠0} φ_k X_k(y) e^{ikx/s}, with s the number of sheets.
// Only k > 0 is stored; the k < 0 half is the complex conjugate.
class HalfPlaneSolution {
 public:
  static HalfPlaneSolution assemble(const CompatResult& compat, int sheets, double mu, double omega,
                                    const AssembleOptions& opts = {});
  // coeffs[k-1] = φ_k for k = 1..N
  static HalfPlaneSolution from_coefficients(double alpha, double mu, double omega,
                                             const std::vector<cplx>& coeffs, int sheets = 1,
                                             const AssembleOptions& opts = {});

  // φ_k X_k(y) and φ_k X_k'(y) for every stored k, reused along a row
  struct Profile {
    double y = 0.0;
    std::vector<cplx> value, slope;
  };
  Profile profile(double y) const;

  double eval(double x, double y) const;
  std::array<double, 2> grad(double x, double y) const;
  double eval(const Profile& p, double x) const;
  std::array<double, 2> grad(const Profile& p, double x) const;
  // v together with (v_x, v_y)
  std::array<double, 3> eval_with_grad(const Profile& p, double x) const;

  double alpha() const { return alpha_; }
  double mu() const { return mu_; }
  double omega() const { return omega_; }
  int sheets() const { return sheets_; }
  int truncation() const { return int(coeffs_.size()); }
  int first_index() const { return n_; }
  // frequency of the leading harmonic, n/sheets
  double leading_frequency() const { return double(n_) / double(sheets_); }
  // sign changes of v(·, y) per 2π window once y is large
  int zeros_per_period() const { return 2 * n_ / sheets_; }
  // v(x + 2π, y) = period_factor()·v(x, y)
  double period_factor() const;
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  const std::vector<Mode>& modes() const { return modes_; }

 private:
  double alpha_ = 0, mu_ = 0, omega_ = 0;
  int sheets_ = 1, n_ = 1;
  std::vector<cplx> coeffs_;
  std::vector<Mode> modes_;

  void build_modes(const AssembleOptions& opts);
};

// OpenMP over rows, one profile per row.
kernels::Grid<double> sample_v(const HalfPlaneSolution& sol, const std::vector<double>& xs,
                               const std::vector<double>& ys,
                               kernels::Exec exec = kernels::Exec::Parallel);
// Serial reference: independent pointwise evaluation.
kernels::Grid<double> sample_v_reference(const HalfPlaneSolution& sol, const std::vector<double>& xs,
                                         const std::vector<double>& ys);

// Five-point residual of −Δv + ωe^{−2y}v_x − e^{−2y}μv on the uniform grid
// [x0,x1]×[y0,y1] of spacing h, relative to the largest term magnitude.
kernels::Residual pde_residual(const HalfPlaneSolution& sol, double x0, double x1, double y0, double y1,
                               double h, kernels::Exec exec = kernels::Exec::Parallel);

struct TraceOptions {
  double max_step = 1e-2;
  double curve_tol = 1e-9;  // relative to the local amplitude |v_x|/κ
  int max_halvings = 20;
  double fit_fraction = 0.25;
  bool require_mu_below_pi2 = true;
};

struct NodalCurve {
  std::vector<std::array<double, 2>> points;  // (x, y), y increasing
  double slope = 0.0;       // fitted dx/dy on the top of the range
  double intercept = 0.0;   // fitted x at y = 0 of the asymptotic line
  double beta = 0.0;        // αy + κx = β + πj on the asymptote
  int index = 0;            // j
  double fit_residual = 0.0;

  // x on the curve at height y: linear interpolation inside the traced range,
  // the fitted line above it, the lowest point below it
  double x_at(double y) const;
};

// Curves sorted by their lower end. Curve 0 has v > 0 on its right and starts
// nearest x = 0; the rest follow within one period of it.
std::vector<NodalCurve> trace_nodal_curves(const HalfPlaneSolution& sol, double y_min, double y_max,
                                           const TraceOptions& opts = {});

// Newton in x at fixed y from x_start; used to pin a curve at a given height.
double refine_nodal_x(const HalfPlaneSolution& sol, const HalfPlaneSolution::Profile& p, double x_start,
                      double tol_rel = 1e-12);

int count_sign_changes(const HalfPlaneSolution& sol, double y, int samples = 4096);

}  // namespace spiral
