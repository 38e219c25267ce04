#include "spiral/specfun.hpp"

#include <array>
#include <cmath>

#include "spiral/errors.hpp"

namespace spiral {

namespace {

// Lanczos approximation, g = 7, nine coefficients.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Γ(w) for Re w ≥ 1/2.
cplx log_gamma_right(cplx w) {
  const cplx z = w - 1.0;
  cplx a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + double(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(kTwoPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

// Order index where the series starts: terms with n+1+ν a non-positive
// integer vanish because 1/Γ does.
int first_live_term(cplx nu) {
  const double m = std::round(-nu.real());
  if (m >= 1.0 && std::abs(nu + m) < 1e-12) return int(m);
  return 0;
}

cplx first_term(cplx nu, cplx z, int n0) {
  if (n0 == 0) return reciprocal_gamma(1.0 + nu);
  cplx c = 1.0;
  for (int j = 1; j <= n0; ++j) c *= (z / 4.0) / double(j);
  return c * reciprocal_gamma(double(n0) + 1.0 + nu);
}

// Σ_{n≥n0} c_n with c_n = c_{n-1}·z/(4n(n+ν)).
cplx sum_series(cplx nu, cplx z, int n0, cplx c, const SeriesConfig& cfg) {
  if (z == cplx(0.0) || c == cplx(0.0)) return n0 == 0 ? c : cplx(0.0);
  cplx sum = c;
  cplx term = c;
  double maxterm = std::abs(c);
  const double az = std::abs(z);
  for (int n = n0 + 1;; ++n) {
    if (n - n0 > cfg.max_terms)
      throw NonConvergence("theta series: max_terms reached before tolerance");
    term *= z / (4.0 * double(n) * (double(n) + nu));
    sum += term;
    const double at = std::abs(term);
    if (at > maxterm) maxterm = at;
    // Once n+1+Re ν > 0 the term ratios decrease, so the next ratio bounds
    // the whole tail geometrically.
    if (double(n) + 1.0 + nu.real() > 0.0) {
      const double rho = az / (4.0 * (n + 1.0) * std::abs(double(n) + 1.0 + nu));
      if (rho < 1.0) {
        const double tail = at * rho / (1.0 - rho);
        if (tail <= cfg.rel_tol * std::abs(sum) || tail <= 1e-17 * maxterm) return sum;
      }
    }
  }
}

// Large |z|: Hankel expansion of I_ν(w), w = √z, with both exponentials kept
// so that the negative real axis, where they balance, stays accurate.
// Θ_ν(z) = (w/2)^{−ν} I_ν(w).
bool use_asymptotic(cplx nu, cplx z) {
  const double aw = std::sqrt(std::abs(z));
  return aw >= 15.0 && std::norm(nu) <= 0.25 * aw;
}

cplx theta_asymptotic(cplx nu, cplx z) {
  const cplx w = std::sqrt(z);
  const cplx mu4 = 4.0 * nu * nu;
  cplx a = 1.0, s_minus = 1.0, s_plus = 1.0;
  double last = 1.0;
  for (int k = 1; k < 400; ++k) {
    a *= (mu4 - double((2 * k - 1) * (2 * k - 1))) / (8.0 * k * w);
    const double at = std::abs(a);
    if (at > last) break;  // the expansion starts to diverge
    s_minus += (k % 2 == 0 ? 1.0 : -1.0) * a;
    s_plus += a;
    last = at;
    if (at < 1e-17) break;
  }
  const double side = w.imag() >= 0.0 ? 1.0 : -1.0;
  const cplx recessive = side * cplx(0.0, 1.0) * std::exp(side * cplx(0.0, kPi) * nu) * std::exp(-2.0 * w);
  const cplx log_pref = -nu * std::log(0.5 * w) + w - 0.5 * std::log(kTwoPi * w);
  return std::exp(log_pref) * (s_minus + recessive * s_plus);
}

cplx theta_plain(cplx nu, cplx z, const SeriesConfig& cfg) {
  if (use_asymptotic(nu, z)) return theta_asymptotic(nu, z);
  const int n0 = first_live_term(nu);
  return sum_series(nu, z, n0, first_term(nu, z, n0), cfg);
}

}  // namespace

cplx reciprocal_gamma(cplx w) {
  const double m = std::round(w.real());
  if (m <= 0.0 && std::abs(w - m) < 1e-12) return 0.0;
  if (w.real() >= 0.5) return std::exp(-log_gamma_right(w));
  // reflection: 1/Γ(w) = sin(πw)Γ(1−w)/π
  return std::sin(kPi * w) * std::exp(log_gamma_right(1.0 - w)) / kPi;
}

cplx theta(cplx nu, cplx z, const SeriesConfig& cfg) { return theta_plain(nu, z, cfg); }

cplx theta_derivative(cplx nu, cplx z, const SeriesConfig& cfg) {
  // term-wise derivative, reindexed: Θ'_ν = Θ_{ν+1}/4
  return theta_plain(nu + 1.0, z, cfg) / 4.0;
}

ThetaValue theta_with_derivative(cplx nu, cplx z, const SeriesConfig& cfg) {
  return {theta_plain(nu, z, cfg), theta_plain(nu + 1.0, z, cfg) / 4.0};
}

ThetaValue theta_normalized(cplx nu, cplx z, const SeriesConfig& cfg) {
  const cplx onep = 1.0 + nu;
  if (first_live_term(nu) != 0 || std::abs(onep) < 1e-12)
    throw InvalidOrder("theta_normalized: 1+nu is a non-positive integer");
  const cplx value = sum_series(nu, z, 0, 1.0, cfg);
  // Γ(1+ν)Θ_{ν+1} = Γ(2+ν)Θ_{ν+1}/(1+ν)
  const cplx deriv = sum_series(nu + 1.0, z, 0, 1.0, cfg) / (4.0 * onep);
  return {value, deriv};
}

std::vector<cplx> theta_coefficients(cplx nu, cplx z, int count) {
  std::vector<cplx> c(std::max(count, 0), cplx(0.0));
  const int n0 = first_live_term(nu);
  if (n0 >= count) return c;
  c[n0] = first_term(nu, z, n0);
  for (int n = n0 + 1; n < count; ++n) c[n] = c[n - 1] * z / (4.0 * double(n) * (double(n) + nu));
  return c;
}

double bessel_j_scaled(double tau, double t, const SeriesConfig& cfg) {
  return theta_normalized(tau, -t * t, cfg).value.real();
}

double bessel_j_first_zero_from(double tau, double t_start, const SeriesConfig& cfg) {
  if (!(tau >= 0.0)) throw InvalidOrder("bessel_j_first_zero: order must be non-negative");
  SeriesConfig c = cfg;
  c.max_terms = std::max(c.max_terms, 2000);
  double lo = t_start;
  if (bessel_j_scaled(tau, lo, c) <= 0.0)
    throw PreconditionFailed("bessel_j_first_zero: start point is past the first zero");
  const double step = 0.1;
  double hi = lo + step;
  int guard = 0;
  while (bessel_j_scaled(tau, hi, c) > 0.0) {
    lo = hi;
    hi += step;
    if (++guard > 100000) throw NonConvergence("bessel_j_first_zero: no sign change found");
  }
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (bessel_j_scaled(tau, mid, c) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double bessel_j_first_zero(double tau, const SeriesConfig& cfg) {
  if (!(tau >= 0.0)) throw InvalidOrder("bessel_j_first_zero: order must be non-negative");
  // J_τ stays positive on (0, τ] and j_{0,1} > 0.5
  return bessel_j_first_zero_from(tau, std::max(tau, 0.5), cfg);
}

ZeroReport theta_zeros(cplx nu, const Rect& region, const ZeroSearchOptions& opts,
                       const SeriesConfig& cfg) {
  auto f = [nu, cfg](cplx z) { return theta_with_derivative(nu, z, cfg); };
  return find_analytic_zeros(f, region, opts);
}

}  // namespace spiral
