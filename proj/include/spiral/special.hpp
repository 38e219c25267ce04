#pragma once

#include <array>
#include <vector>

#include "spiral/specfun.hpp"

namespace spiral {

enum class SpecialKind { Dirichlet, Robin, Entire, Caloric };
const char* to_string(SpecialKind k);

struct SpecialMode {
  SpecialKind kind = SpecialKind::Dirichlet;
  int k = 1;
  double alpha = 0.0;
  cplx lambda;
  double omega = 0.0;  // Im λ / k
  double mu = 0.0;     // α·Im λ/k − Re λ
  double sigma = 0.0;  // Robin coefficient
};

SpecialMode make_special_mode(SpecialKind kind, int k, double alpha, cplx lambda, double sigma = 0.0);

// v(x,y) = e^{αx}·Re(e^{ikx}D(y)), D(y) = e^{(−k+iα)y}Θ_{k−iα}(λe^{−2y}).
class SingleModeField {
 public:
  SingleModeField(int k, double alpha, cplx lambda, const SeriesConfig& cfg = {});

  double eval(double x, double y) const;
  std::array<double, 2> grad(double x, double y) const;
  cplx D(double y) const;
  std::array<cplx, 2> D_with_derivative(double y) const;

  int k() const { return k_; }
  double alpha() const { return alpha_; }
  cplx lambda() const { return lambda_; }
  double omega() const { return lambda_.imag() / k_; }
  double mu() const { return alpha_ * lambda_.imag() / k_ - lambda_.real(); }
  cplx order() const { return {double(k_), -alpha_}; }

 private:
  int k_;
  double alpha_;
  cplx lambda_;
  SeriesConfig cfg_;
};

struct RingCheckOptions {
  int samples = 2000;
  double distance_tol = 1e-7;  // relative to 1 + |λ|
};

// No zero of Θ_ν on {tλ : t ∈ [0, 1)}: zero search over the segment's box
// plus dense sampling of |Θ| along it.
bool ring_condition(cplx nu, cplx lambda, const RingCheckOptions& opts = {});

std::vector<SpecialMode> dirichlet_modes(int k, double alpha, const Rect& region,
                                         const ZeroSearchOptions& opts = {});

// Zeros of F(λ) = 2λΘ'(λ) + (k − iα − σ)Θ(λ) that pass the ring test on Θ.
std::vector<SpecialMode> robin_modes(int k, double alpha, double sigma, const Rect& region,
                                     const ZeroSearchOptions& opts = {});
ThetaValue robin_function(cplx nu, double sigma, cplx lambda, const SeriesConfig& cfg = {});

struct EntireOptions {
  double ray_check_radius = 0.0;  // 0 picks max(4|λ|, 200)
  double ray_step = 0.02;         // sampling step in √|z|
};

// Checks the ray condition and returns the field; RayBlocked otherwise.
SingleModeField entire_solution(int k, double alpha, cplx lambda, const EntireOptions& opts = {});

struct NodalAsymptote {
  double slope_plus = 0.0;           // fitted dζ/dy for y → +∞
  double slope_expected = 0.0;       // −α/k
  double exp_coefficient_fit = 0.0;  // c in ζ ≈ c₀ + c·e^{−y} for y → −∞
  double exp_coefficient_closed_form = 0.0;
  bool linear = false;               // ω = μ = 0
  double linear_deviation = 0.0;     // max |ζ − (β − αy)/k| when linear
  std::vector<double> ys, zeta;      // traced nodal curve, j = 0
};

// Phase-based tracing: ζ(y) = (π/2 − ϑ(y))/k with ϑ(y) = αy + arg Θ(λe^{−2y}) unwrapped.
NodalAsymptote nodal_asymptote(const SingleModeField& f, double Y = 4.0, double dy = 5e-3);

// Re[e^{ik(θ+ωt)} I_k((√(2ωk)/2)(1+i)r)]
double caloric_eval(int k, double omega, double r, double theta, double t, const SeriesConfig& cfg = {});

// max over sample points of |U_t − ΔU| / (|U_t| + |U_rr| + |U_r/r| + |U_θθ/r²|), polar differences
double caloric_heat_residual(int k, double omega, double r_lo, double r_hi, double h = 1e-3);

int caloric_sign_changes(int k, double omega, double r, double t, int samples = 4096);

struct CaloricPitch {
  double slope_fit = 0.0;  // dθ/dr of the nodal line, signed
  double expected = 0.0;   // √(ω/(2k))
  std::vector<double> radii, angles;
};
CaloricPitch caloric_pitch(int k, double omega, double r_lo = 10.0, double r_hi = 50.0);

}  // namespace spiral
