#include "spiral/modes.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "spiral/errors.hpp"

namespace spiral {

cplx lambda_of(const ModeParams& p) {
  return {p.omega * p.alpha - p.mu, p.omega * p.frequency()};
}

cplx order_of(const ModeParams& p) {
  if (p.k == 0) throw PreconditionFailed("mode index k must be nonzero");
  const double kappa = p.frequency();
  return (kappa > 0 ? 1.0 : -1.0) * cplx(kappa, -p.alpha);
}

bool is_resonant(const ModeParams& p, double tol, const SeriesConfig& cfg) {
  // normalized Θ equals 1 at the origin, so the test is relative to |Θ_ν(0)|
  return std::abs(theta_normalized(order_of(p), lambda_of(p), cfg).value) < tol;
}

Mode Mode::build(const ModeParams& p, double resonance_tol, const SeriesConfig& cfg) {
  Mode m;
  m.p_ = p;
  m.nu_ = order_of(p);
  m.lambda_ = lambda_of(p);
  m.cfg_ = cfg;
  m.theta_lambda_ = theta_normalized(m.nu_, m.lambda_, cfg).value;
  if (std::abs(m.theta_lambda_) < resonance_tol)
    throw ResonantMode(p.k, "mode k=" + std::to_string(p.k) + " is resonant: Theta_nu(lambda) = 0");
  return m;
}

std::pair<cplx, cplx> Mode::eval_with_derivative(double y) const {
  const cplx z = lambda_ * std::exp(-2.0 * y);
  const ThetaValue t = theta_normalized(nu_, z, cfg_);
  const cplx decay = std::exp(-nu_ * y) / theta_lambda_;
  return {t.value * decay, (t.derivative * (-2.0 * z) - nu_ * t.value) * decay};
}

cplx Mode::eval(double y) const {
  const cplx z = lambda_ * std::exp(-2.0 * y);
  return theta_normalized(nu_, z, cfg_).value / theta_lambda_ * std::exp(-nu_ * y);
}

cplx Mode::derivative(double y) const { return eval_with_derivative(y).second; }

double mode_ode_residual(const Mode& m, double y0, double y1, double h) {
  if (!(h > 0.0) || !(y1 > y0 + 2.0 * h)) throw PreconditionFailed("mode_ode_residual: bad grid");
  const auto n = std::size_t(std::llround((y1 - y0) / h));
  std::vector<cplx> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = m.eval(y0 + double(i) * h);
  const cplx nu2 = m.nu() * m.nu();
  double worst = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double y = y0 + double(i) * h;
    const cplx d2 = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / (h * h);
    const cplx rhs = (nu2 + m.lambda() * std::exp(-2.0 * y)) * x[i];
    const double scale = std::abs(d2) + std::abs(rhs);
    if (scale > 0.0) worst = std::max(worst, std::abs(d2 - rhs) / scale);
  }
  return worst;
}

const char* to_string(Coercivity c) {
  switch (c) {
    case Coercivity::MuSmall: return "MuSmall";
    case Coercivity::OmegaAlphaSmall: return "OmegaAlphaSmall";
    case Coercivity::SupCondition: return "SupCondition";
    case Coercivity::Unknown: return "Unknown";
  }
  return "Unknown";
}

Coercivity coercivity_certificate(const ModeParams& p, const CoercivityScan& scan) {
  const double kappa = p.frequency();
  const double rk = std::sqrt(kappa * kappa + p.alpha * p.alpha);
  if (p.mu < (kJ01 + rk) * (kJ01 + rk)) return Coercivity::MuSmall;
  if (p.alpha == 0.0) return Coercivity::Unknown;
  if (p.omega / p.alpha < 2.0) return Coercivity::OmegaAlphaSmall;

  const double c = p.omega / (2.0 * p.alpha);
  const double rhs = p.mu - c * rk * rk;
  // j_{τ,1} from Boost here: the alternating Θ series loses too many digits
  // near the first zero once τ reaches the tens.
  const auto gain = [c](double tau) {
    const double j = boost::math::cyl_bessel_j_zero(tau, 1);
    return j * j - c * tau * tau;
  };
  double best = gain(scan.step), best_tau = scan.step;
  for (double tau = scan.step; tau <= scan.tau_max + 1e-12; tau += scan.step) {
    const double g = gain(tau);
    if (g > rhs) return Coercivity::SupCondition;
    if (g > best) best = g, best_tau = tau;
  }
  // golden-section refinement around the best sample
  double a = std::max(1e-6, best_tau - scan.step), b = std::min(scan.tau_max, best_tau + scan.step);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
    const double m1 = b - r * (b - a), m2 = a + r * (b - a);
    if (gain(m1) > gain(m2))
      b = m2;
    else
      a = m1;
  }
  if (gain(0.5 * (a + b)) > rhs) return Coercivity::SupCondition;
  return Coercivity::Unknown;
}

ModeNorms mode_norms(const Mode& m) {
  using boost::math::quadrature::gauss_kronrod;
  const double kappa = std::abs(m.params().frequency());
  const double Y = std::max(1.0, 12.0 * std::log(10.0) / kappa);
  const int pieces = std::max(1, int(std::ceil(Y * kappa / 2.0)));
  double l2 = 0.0, semi = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = Y * i / pieces, b = Y * (i + 1) / pieces;
    l2 += gauss_kronrod<double, 31>::integrate([&m](double y) { return std::norm(m.eval(y)); }, a, b,
                                               15, 1e-12);
    semi += gauss_kronrod<double, 31>::integrate(
        [&m](double y) { return std::norm(m.derivative(y)); }, a, b, 15, 1e-12);
  }
  // tail beyond Y where X ≈ Ce^{−νy}
  const auto [xY, dY] = m.eval_with_derivative(Y);
  l2 += std::norm(xY) / (2.0 * kappa);
  semi += std::norm(dY) / (2.0 * kappa);

  ModeNorms out;
  out.l2 = std::sqrt(l2);
  out.h1_seminorm = std::sqrt(semi);
  const int samples = 2000;
  double best = 0.0, best_y = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double y = Y * i / samples;
    const double v = std::abs(m.eval(y));
    if (v > best) best = v, best_y = y;
  }
  double a = std::max(0.0, best_y - Y / samples), b = std::min(Y, best_y + Y / samples);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    const double m1 = b - r * (b - a), m2 = a + r * (b - a);
    if (std::abs(m.eval(m1)) > std::abs(m.eval(m2)))
      b = m2;
    else
      a = m1;
  }
  out.sup = std::max(best, std::abs(m.eval(0.5 * (a + b))));
  return out;
}

}  // namespace spiral
