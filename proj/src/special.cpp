#include "spiral/special.hpp"

#include <algorithm>
#include <cmath>

#include "spiral/errors.hpp"

namespace spiral {

namespace {

SeriesConfig wide(const SeriesConfig& cfg) {
  SeriesConfig c = cfg;
  c.max_terms = std::max(c.max_terms, 4000);
  return c;
}

double unwrap(double prev, double a) { return a + kTwoPi * std::round((prev - a) / kTwoPi); }

struct Line {
  double slope = 0.0, intercept = 0.0;
};

Line fit_line(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = double(t.size());
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < t.size(); ++i) st += t[i], sv += v[i], stt += t[i] * t[i], stv += t[i] * v[i];
  Line l;
  l.slope = (n * stv - st * sv) / (n * stt - st * st);
  l.intercept = (sv - l.slope * st) / n;
  return l;
}

}  // namespace

const char* to_string(SpecialKind k) {
  switch (k) {
    case SpecialKind::Dirichlet: return "Dirichlet";
    case SpecialKind::Robin: return "Robin";
    case SpecialKind::Entire: return "Entire";
    case SpecialKind::Caloric: return "Caloric";
  }
  return "Dirichlet";
}

SpecialMode make_special_mode(SpecialKind kind, int k, double alpha, cplx lambda, double sigma) {
  if (k < 1) throw PreconditionFailed("special modes need k >= 1");
  SpecialMode m;
  m.kind = kind;
  m.k = k;
  m.alpha = alpha;
  m.lambda = lambda;
  m.sigma = sigma;
  m.omega = lambda.imag() / k;
  m.mu = alpha * lambda.imag() / k - lambda.real();
  return m;
}

SingleModeField::SingleModeField(int k, double alpha, cplx lambda, const SeriesConfig& cfg)
    : k_(k), alpha_(alpha), lambda_(lambda), cfg_(wide(cfg)) {
  if (k < 1) throw PreconditionFailed("single-mode fields need k >= 1");
}

cplx SingleModeField::D(double y) const {
  return std::exp(cplx(-k_, alpha_) * y) * theta(order(), lambda_ * std::exp(-2.0 * y), cfg_);
}

std::array<cplx, 2> SingleModeField::D_with_derivative(double y) const {
  const cplx z = lambda_ * std::exp(-2.0 * y);
  const ThetaValue t = theta_with_derivative(order(), z, cfg_);
  const cplx e = std::exp(cplx(-k_, alpha_) * y);
  return {e * t.value, cplx(-k_, alpha_) * e * t.value + e * t.derivative * (-2.0 * z)};
}

double SingleModeField::eval(double x, double y) const {
  return std::exp(alpha_ * x) * (std::polar(1.0, k_ * x) * D(y)).real();
}

std::array<double, 2> SingleModeField::grad(double x, double y) const {
  const auto d = D_with_derivative(y);
  const cplx e = std::polar(1.0, k_ * x);
  const double ea = std::exp(alpha_ * x);
  const double v = ea * (e * d[0]).real();
  return {alpha_ * v + ea * (cplx(0.0, k_) * e * d[0]).real(), ea * (e * d[1]).real()};
}

bool ring_condition(cplx nu, cplx lambda, const RingCheckOptions& opts) {
  if (lambda == cplx(0.0)) return true;
  const double tol = opts.distance_tol * (1.0 + std::abs(lambda));
  const Rect box{std::min(0.0, lambda.real()) - 1.0, std::max(0.0, lambda.real()) + 1.0,
                 std::min(0.0, lambda.imag()) - 1.0, std::max(0.0, lambda.imag()) + 1.0};
  for (const cplx& z : theta_zeros(nu, box).zeros) {
    if (std::abs(z - lambda) < tol) continue;
    const double t = std::clamp((z / lambda).real(), 0.0, 1.0);
    if (std::abs(z - t * lambda) < tol && t < 1.0) return false;
  }
  const SeriesConfig cfg = wide({});
  std::vector<double> mags(opts.samples);
  double sup = 0.0;
  for (int i = 0; i < opts.samples; ++i) {
    mags[i] = std::abs(theta(nu, lambda * (double(i) / opts.samples), cfg));
    sup = std::max(sup, mags[i]);
  }
  for (double m : mags)
    if (m < 1e-12 * sup) return false;
  return true;
}

std::vector<SpecialMode> dirichlet_modes(int k, double alpha, const Rect& region, const ZeroSearchOptions& opts) {
  if (k < 1) throw PreconditionFailed("dirichlet_modes needs k >= 1");
  const cplx nu(k, -alpha);
  std::vector<SpecialMode> out;
  for (const cplx& z : theta_zeros(nu, region, opts).zeros)
    if (ring_condition(nu, z)) out.push_back(make_special_mode(SpecialKind::Dirichlet, k, alpha, z));
  return out;
}

ThetaValue robin_function(cplx nu, double sigma, cplx lambda, const SeriesConfig& cfg) {
  const ThetaValue t = theta_with_derivative(nu, lambda, cfg);
  const cplx second = theta(nu + 2.0, lambda, cfg) / 16.0;
  const cplx c = nu - sigma;
  return {2.0 * lambda * t.derivative + c * t.value,
          2.0 * t.derivative + 2.0 * lambda * second + c * t.derivative};
}

std::vector<SpecialMode> robin_modes(int k, double alpha, double sigma, const Rect& region,
                                     const ZeroSearchOptions& opts) {
  if (k < 1) throw PreconditionFailed("robin_modes needs k >= 1");
  const cplx nu(k, -alpha);
  const auto f = [nu, sigma](cplx z) { return robin_function(nu, sigma, z); };
  std::vector<SpecialMode> out;
  for (const cplx& z : find_analytic_zeros(f, region, opts).zeros)
    if (ring_condition(nu, z)) out.push_back(make_special_mode(SpecialKind::Robin, k, alpha, z, sigma));
  return out;
}

SingleModeField entire_solution(int k, double alpha, cplx lambda, const EntireOptions& opts) {
  SingleModeField field(k, alpha, lambda);
  if (lambda == cplx(0.0)) return field;
  const cplx nu = field.order();
  const SeriesConfig cfg = wide({});
  const double L = std::abs(lambda);
  const double R = opts.ray_check_radius > 0.0 ? opts.ray_check_radius : std::max(4.0 * L, 200.0);
  // sample in s = √|z| so that consecutive zeros are resolved uniformly
  std::vector<double> ts, mags;
  for (double s = opts.ray_step; s * s <= R; s += opts.ray_step) {
    ts.push_back(s * s / L);
    mags.push_back(std::abs(theta(nu, ts.back() * lambda, cfg)));
  }
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    if (!(mags[i] <= mags[i - 1] && mags[i] <= mags[i + 1])) continue;
    cplx z = ts[i] * lambda;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const ThetaValue v = theta_with_derivative(nu, z, cfg);
      if (v.value == cplx(0.0)) {
        converged = true;
        break;
      }
      if (v.derivative == cplx(0.0)) break;
      cplx step = v.value / v.derivative;
      if (std::abs(step) > 1.0) step /= std::abs(step);
      z -= step;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) continue;
    const cplx w = z / lambda;
    if (w.real() > 0.0 && std::abs(w.imag()) * L <= 1e-6 * (1.0 + std::abs(z)))
      throw RayBlocked(w.real(), "a zero of Theta lies on the ray through lambda at t=" + std::to_string(w.real()));
  }
  return field;
}

NodalAsymptote nodal_asymptote(const SingleModeField& f, double Y, double dy) {
  NodalAsymptote out;
  const int k = f.k();
  const double alpha = f.alpha();
  const cplx nu = f.order();
  const cplx lambda = f.lambda();
  const SeriesConfig cfg = wide({});
  const auto steps = std::size_t(std::llround(2.0 * Y / dy));
  out.ys.resize(steps + 1);
  out.zeta.resize(steps + 1);
  double phase = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double y = Y - double(i) * dy;
    const double a = std::arg(theta(nu, lambda * std::exp(-2.0 * y), cfg));
    if (i == 0) {
      phase = a;
    } else {
      const double next = unwrap(phase, a);
      if (std::abs(next - phase) > 1.0) throw CurveLost("phase of Theta jumps; reduce the y step");
      phase = next;
    }
    out.ys[steps - i] = y;
    out.zeta[steps - i] = (0.5 * kPi - (alpha * y + phase)) / k;
  }
  std::vector<double> up_y, up_z, lo_e, lo_z;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double y = out.ys[i];
    if (y >= 0.5 * Y) up_y.push_back(y), up_z.push_back(out.zeta[i]);
    if (y <= -0.5 * Y) lo_e.push_back(std::exp(-y)), lo_z.push_back(out.zeta[i]);
  }
  out.slope_plus = fit_line(up_y, up_z).slope;
  out.slope_expected = -alpha / k;
  out.exp_coefficient_fit = fit_line(lo_e, lo_z).slope;

  const double omega = f.omega(), mu = f.mu();
  if (omega != 0.0) {
    const double a = 0.5 * (omega * alpha - mu), b = 0.5 * omega * k;
    out.exp_coefficient_closed_form = (omega > 0 ? 1.0 : -1.0) * std::sqrt(std::hypot(a, b) - a) / k;
  } else if (mu > 0.0) {
    out.exp_coefficient_closed_form = (alpha > 0 ? 1.0 : (alpha < 0 ? -1.0 : 0.0)) * std::sqrt(mu) / k;
  }
  out.linear = omega == 0.0 && mu == 0.0;
  if (out.linear) {
    const std::size_t mid = steps / 2;
    for (std::size_t i = 0; i <= steps; ++i)
      out.linear_deviation = std::max(
          out.linear_deviation, std::abs(out.zeta[i] - (out.zeta[mid] - alpha * (out.ys[i] - out.ys[mid]) / k)));
  }
  return out;
}

double caloric_eval(int k, double omega, double r, double theta_angle, double t, const SeriesConfig& cfg) {
  if (k < 1) throw PreconditionFailed("caloric_eval needs k >= 1");
  if (!(omega > 0.0)) throw PreconditionFailed("caloric_eval needs omega > 0");
  const double c = 0.5 * std::sqrt(2.0 * omega * k);
  const cplx z = c * cplx(1.0, 1.0) * r;
  const cplx I = std::pow(0.5 * z, k) * theta(double(k), z * z, wide(cfg));
  return (std::polar(1.0, k * (theta_angle + omega * t)) * I).real();
}

double caloric_heat_residual(int k, double omega, double r_lo, double r_hi, double h) {
  double worst = 0.0;
  const int nr = 40, nt = 16;
  for (int i = 0; i < nr; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / (nr - 1);
    double res = 0.0, scale = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double th = kTwoPi * (j + 0.37) / nt;
      const auto U = [&](double rr, double tt, double time) { return caloric_eval(k, omega, rr, tt, time); };
      const double c = U(r, th, 0.0);
      const double ut = (U(r, th, h) - U(r, th, -h)) / (2.0 * h);
      const double urr = (U(r + h, th, 0.0) - 2.0 * c + U(r - h, th, 0.0)) / (h * h);
      const double ur = (U(r + h, th, 0.0) - U(r - h, th, 0.0)) / (2.0 * h);
      const double utt = (U(r, th + h, 0.0) - 2.0 * c + U(r, th - h, 0.0)) / (h * h);
      res = std::max(res, std::abs(ut - (urr + ur / r + utt / (r * r))));
      scale = std::max(scale, std::abs(ut) + std::abs(urr) + std::abs(ur / r) + std::abs(utt / (r * r)));
    }
    worst = std::max(worst, res / scale);
  }
  return worst;
}

int caloric_sign_changes(int k, double omega, double r, double t, int samples) {
  int count = 0;
  const double first = caloric_eval(k, omega, r, 0.0123, t);
  double prev = first;
  for (int j = 1; j <= samples; ++j) {
    const double v = j == samples ? first : caloric_eval(k, omega, r, 0.0123 + kTwoPi * j / samples, t);
    if ((v > 0) != (prev > 0)) ++count;
    prev = v;
  }
  return count;
}

CaloricPitch caloric_pitch(int k, double omega, double r_lo, double r_hi) {
  CaloricPitch out;
  out.expected = std::sqrt(omega / (2.0 * k));
  const double c = 0.5 * std::sqrt(2.0 * omega * k);
  const SeriesConfig cfg = wide({});
  const double dr = 0.01;
  double phase = 0.0;
  bool first = true;
  std::vector<double> rs, th;
  for (double r = 0.05; r <= r_hi + 1e-12; r += dr) {
    const cplx z = c * cplx(1.0, 1.0) * r;
    // arg I_k(z) = k·arg(z/2) + arg Θ_k(z²), the first term being kπ/4
    const double a = k * 0.25 * kPi + std::arg(theta(double(k), z * z, cfg));
    phase = first ? a : unwrap(phase, a);
    first = false;
    if (r >= r_lo) {
      rs.push_back(r);
      th.push_back((0.5 * kPi - phase) / k);
    }
  }
  out.slope_fit = fit_line(rs, th).slope;
  out.radii = std::move(rs);
  out.angles = std::move(th);
  return out;
}

}  // namespace spiral
