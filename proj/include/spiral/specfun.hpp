#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace spiral {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
// first positive zero of J_0
inline constexpr double kJ01 = 2.404825557695773;

struct SeriesConfig {
  double rel_tol = 1e-12;
  int max_terms = 500;
};

struct ThetaValue {
  cplx value;
  cplx derivative;
};

// 1/Γ(w). Exactly zero within 1e-12 of a non-positive integer.
cplx reciprocal_gamma(cplx w);

// Θ_ν(z) = Σ (z/4)^n / (n! Γ(n+1+ν)), so that I_ν(z) = (z/2)^ν Θ_ν(z²).
cplx theta(cplx nu, cplx z, const SeriesConfig& cfg = {});
cplx theta_derivative(cplx nu, cplx z, const SeriesConfig& cfg = {});
ThetaValue theta_with_derivative(cplx nu, cplx z, const SeriesConfig& cfg = {});

// Γ(1+ν)·Θ_ν and Γ(1+ν)·Θ'_ν. Equal to 1 and 1/(4(1+ν)) at z = 0, so large
// orders neither underflow nor need a Gamma evaluation. Ratios of Θ at the
// same order are unchanged by the factor. Not defined when 1+ν is a
// non-positive integer.
ThetaValue theta_normalized(cplx nu, cplx z, const SeriesConfig& cfg = {});

// Coefficient generator: the first `count` terms (z/4)^n/(n!Γ(n+1+ν)),
// built by c_n = c_{n-1}·z/(4n(n+ν)).
std::vector<cplx> theta_coefficients(cplx nu, cplx z, int count);

// Sign-faithful multiple of J_τ(t) for t > 0: Γ(1+τ)Θ_τ(−t²) = J_τ(t)Γ(1+τ)(2/t)^τ.
double bessel_j_scaled(double tau, double t, const SeriesConfig& cfg = {});

// j_{τ,1}, first positive zero of J_τ, by bracketing and bisection.
double bessel_j_first_zero(double tau, const SeriesConfig& cfg = {});
// Same, bracketing forward from t_start (must lie below the zero).
double bessel_j_first_zero_from(double tau, double t_start, const SeriesConfig& cfg = {});

struct Rect {
  double re_min, re_max, im_min, im_max;
  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
  }
};

struct ZeroSearchOptions {
  double spacing = 0.5;
  double residual_rel = 1e-10;  // |f| ≤ residual_rel·sup_region|f|
  int newton_max_iter = 60;
  bool parallel = true;
};

struct DroppedCandidate {
  cplx start;
  std::string reason;
};

struct ZeroReport {
  std::vector<cplx> zeros;  // sorted by modulus
  std::vector<DroppedCandidate> dropped;
  double sup_abs = 0.0;  // sup of |f| over the grid nodes
};

// Zeros of an analytic function inside `region`: winding numbers on grid
// cells plus local minima of |f| seed a Newton polish.
ZeroReport find_analytic_zeros(const std::function<ThetaValue(cplx)>& f, const Rect& region,
                               const ZeroSearchOptions& opts = {});

ZeroReport theta_zeros(cplx nu, const Rect& region, const ZeroSearchOptions& opts = {},
                       const SeriesConfig& cfg = {});

}  // namespace spiral
