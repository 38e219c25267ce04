#pragma once

#include <array>
#include <vector>

#include "spiral/compat.hpp"
#include "spiral/halfplane.hpp"

namespace spiral {

// (x, y) ↦ (e^{−y}cos x, e^{−y}sin x)
std::array<double, 2> to_disk(double x, double y);
// inverse, with x folded into [0, 2π); DomainError at the origin or outside the open disk
std::array<double, 2> from_disk(double X, double Y);

struct DiskOptions {
  double y_min = 0.05;
  double y_max = 8.0;
  double band_tol = 1e-9;  // |v| below band_tol·envelope counts as the free boundary
  TraceOptions trace;
};

// Segregated densities u_i on the punctured disk, built from a half-plane
// solution and its traced nodal curves.
class DiskDensities {
 public:
  DiskDensities(CompetitionSetup setup, HalfPlaneSolution sol, const DiskOptions& opts = {});

  struct Lift {
    double x = 0.0, y = 0.0;
    int strip = 0;  // 0-based species index
  };
  Lift lift(double X, double Y) const;

  // One non-negative entry per species; throws UnclassifiedPoint inside the
  // boundary band or when the sign contradicts the strip.
  std::vector<double> densities(double X, double Y) const;
  // Same, with zeros instead of an error inside the boundary band.
  std::vector<double> densities_or_zero(double X, double Y) const;
  // densities_or_zero at radius r and each angle, one profile for the whole circle
  std::vector<std::vector<double>> ring(double r, const std::vector<double>& thetas) const;
  // Σ (−1)^{i+1} u_i / l_i
  double combined(double X, double Y) const;

  // √(v² + (v_x/κ)²), the local oscillation amplitude of v
  double envelope(double x, double y) const;
  // x of every nodal curve at height y, pinned by Newton, starting with curve 0
  std::vector<double> nodal_positions(const HalfPlaneSolution::Profile& p) const;

  const std::vector<NodalCurve>& curves() const { return curves_; }
  const HalfPlaneSolution& solution() const { return sol_; }
  const CompetitionSetup& setup() const { return setup_; }
  int species() const { return setup_.K; }

 private:
  CompetitionSetup setup_;
  HalfPlaneSolution sol_;
  DiskOptions opts_;
  std::vector<NodalCurve> curves_;

  std::vector<double> classify(double X, double Y, bool zero_in_band) const;
  std::vector<double> classify_at(const HalfPlaneSolution::Profile& p, const std::vector<double>& zs, double theta,
                                  bool zero_in_band) const;
};

struct SpiralFit {
  double gamma_fit = 0.0;
  double gamma_expected = 0.0;  // K/2 + 2α²/K
  double gamma_residual = 0.0;
  double alpha_fit = 0.0;
  double alpha_residual = 0.0;
  double amplitude_lo = 0.0, amplitude_hi = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  double max_arm_gap_error = 0.0;  // relative to 2π/K
  std::vector<double> radii, max_abs_u, nodal_angle;
};

SpiralFit spiral_fit(const DiskDensities& d, double r_lo, double r_hi, int samples = 40);

}  // namespace spiral
