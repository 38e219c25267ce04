#include "spiral/diskmap.hpp"

#include <algorithm>
#include <cmath>

#include "spiral/errors.hpp"

namespace spiral {

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit least_squares(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = double(t.size());
  double st = 0, sv = 0, stt = 0, stv = 0;
  for (std::size_t i = 0; i < t.size(); ++i) st += t[i], sv += v[i], stt += t[i] * t[i], stv += t[i] * v[i];
  LineFit f;
  f.slope = (n * stv - st * sv) / (n * stt - st * st);
  f.intercept = (sv - f.slope * st) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = v[i] - f.intercept - f.slope * t[i];
    rss += e * e;
  }
  f.rms = std::sqrt(rss / n);
  return f;
}

}  // namespace

std::array<double, 2> to_disk(double x, double y) {
  const double r = std::exp(-y);
  return {r * std::cos(x), r * std::sin(x)};
}

std::array<double, 2> from_disk(double X, double Y) {
  const double r = std::hypot(X, Y);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("from_disk: point must lie in the punctured open unit disk");
  double x = std::atan2(Y, X);
  if (x < 0.0) x += kTwoPi;
  if (x >= kTwoPi) x -= kTwoPi;
  return {x, -std::log(r)};
}

DiskDensities::DiskDensities(CompetitionSetup setup, HalfPlaneSolution sol, const DiskOptions& opts)
    : setup_(std::move(setup)), sol_(std::move(sol)), opts_(opts) {
  if (sol_.zeros_per_period() != setup_.K)
    throw PreconditionFailed("solution has " + std::to_string(sol_.zeros_per_period()) +
                             " nodal curves per period but the setup has K=" + std::to_string(setup_.K));
  curves_ = trace_nodal_curves(sol_, opts_.y_min, opts_.y_max, opts_.trace);
}

std::vector<double> DiskDensities::nodal_positions(const HalfPlaneSolution::Profile& p) const {
  const double spacing = kPi / sol_.leading_frequency();
  std::vector<double> xs(curves_.size());
  for (std::size_t j = 0; j < curves_.size(); ++j) {
    const double guess = curves_[j].x_at(p.y);
    double x = guess;
    try {
      x = refine_nodal_x(sol_, p, guess, 1e-12);
      if (std::abs(x - guess) > 0.25 * spacing) x = guess;
    } catch (const CurveLost&) {
      x = guess;
    }
    xs[j] = x;
  }
  return xs;
}

DiskDensities::Lift DiskDensities::lift(double X, double Y) const {
  const auto [theta, y] = from_disk(X, Y);
  const auto p = sol_.profile(y);
  const auto zs = nodal_positions(p);
  Lift L;
  L.y = y;
  L.x = theta - kTwoPi * std::floor((theta - zs[0]) / kTwoPi);
  for (std::size_t j = 1; j < zs.size(); ++j)
    if (zs[j] <= L.x) L.strip = int(j);
  return L;
}

std::vector<double> DiskDensities::classify(double X, double Y, bool zero_in_band) const {
  const auto [theta, y] = from_disk(X, Y);
  const auto p = sol_.profile(y);
  return classify_at(p, nodal_positions(p), theta, zero_in_band);
}

std::vector<double> DiskDensities::classify_at(const HalfPlaneSolution::Profile& p, const std::vector<double>& zs,
                                               double theta, bool zero_in_band) const {
  const double x = theta - kTwoPi * std::floor((theta - zs[0]) / kTwoPi);
  int strip = 0;
  for (std::size_t j = 1; j < zs.size(); ++j)
    if (zs[j] <= x) strip = int(j);
  const auto r = sol_.eval_with_grad(p, x);
  const double env = std::hypot(r[0], r[1] / sol_.leading_frequency());
  std::vector<double> u(setup_.K, 0.0);
  if (std::abs(r[0]) < opts_.band_tol * env) {
    if (zero_in_band) return u;
    throw UnclassifiedPoint("point lies on the free boundary band");
  }
  const double val = (strip % 2 == 0 ? 1.0 : -1.0) * setup_.l[strip] * r[0];
  if (val < 0.0) throw UnclassifiedPoint("sign of v contradicts the strip label");
  u[strip] = val;
  return u;
}

std::vector<double> DiskDensities::densities(double X, double Y) const { return classify(X, Y, false); }

std::vector<double> DiskDensities::densities_or_zero(double X, double Y) const {
  return classify(X, Y, true);
}

std::vector<std::vector<double>> DiskDensities::ring(double r, const std::vector<double>& thetas) const {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("ring radius must lie in (0, 1)");
  const auto p = sol_.profile(-std::log(r));
  const auto zs = nodal_positions(p);
  std::vector<std::vector<double>> out;
  out.reserve(thetas.size());
  for (double th : thetas) out.push_back(classify_at(p, zs, th, true));
  return out;
}

double DiskDensities::combined(double X, double Y) const {
  const auto u = densities_or_zero(X, Y);
  double s = 0.0;
  for (int i = 0; i < setup_.K; ++i) s += (i % 2 == 0 ? 1.0 : -1.0) * u[i] / setup_.l[i];
  return s;
}

double DiskDensities::envelope(double x, double y) const {
  const auto r = sol_.eval_with_grad(sol_.profile(y), x);
  return std::hypot(r[0], r[1] / sol_.leading_frequency());
}

SpiralFit spiral_fit(const DiskDensities& d, double r_lo, double r_hi, int samples) {
  if (!(r_lo > 0.0 && r_hi > r_lo && r_hi < 1.0)) throw PreconditionFailed("spiral_fit needs 0 < r_lo < r_hi < 1");
  if (r_hi / r_lo < 10.0) throw InsufficientDecades("spiral_fit needs at least one decade of radii");
  if (samples < 3) throw PreconditionFailed("spiral_fit needs at least three radii");
  const auto& sol = d.solution();
  const int K = d.species();
  const double kappa = sol.leading_frequency();
  const double alpha = sol.alpha();

  SpiralFit fit;
  fit.r_lo = r_lo;
  fit.r_hi = r_hi;
  fit.gamma_expected = 0.5 * K + 2.0 * alpha * alpha / K;
  fit.radii.resize(samples);
  fit.max_abs_u.resize(samples);
  fit.nodal_angle.resize(samples);
  std::vector<double> amp_lo(samples), amp_hi(samples), gap_err(samples);
  std::vector<std::vector<double>> envelopes(samples);

  kernels::for_each_index(samples, [&](std::ptrdiff_t s) {
    const double r = r_lo * std::pow(r_hi / r_lo, double(s) / (samples - 1));
    const double y = -std::log(r);
    const auto p = sol.profile(y);
    const auto zs = d.nodal_positions(p);
    const int M = 720;
    double best = 0.0, best_x = zs[0];
    std::vector<double> env(M);
    for (int i = 0; i < M; ++i) {
      const double x = zs[0] + kTwoPi * (i + 0.5) / M;
      const auto g = sol.eval_with_grad(p, x);
      if (std::abs(g[0]) > best) best = std::abs(g[0]), best_x = x;
      env[i] = std::hypot(g[0], g[1] / kappa);
    }
    double a = best_x - kTwoPi / M, b = best_x + kTwoPi / M;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      const double m1 = b - gr * (b - a), m2 = a + gr * (b - a);
      if (std::abs(sol.eval(p, m1)) > std::abs(sol.eval(p, m2)))
        b = m2;
      else
        a = m1;
    }
    best = std::max(best, std::abs(sol.eval(p, 0.5 * (a + b))));
    double worst_gap = 0.0;
    for (int j = 0; j < K; ++j) {
      const double next = (j + 1 < K) ? zs[j + 1] : zs[0] + kTwoPi;
      worst_gap = std::max(worst_gap, std::abs((next - zs[j]) / (kTwoPi / K) - 1.0));
    }
    fit.radii[s] = r;
    fit.max_abs_u[s] = best;
    fit.nodal_angle[s] = zs[0];
    gap_err[s] = worst_gap;
    envelopes[s] = std::move(env);
  });

  std::vector<double> lr(samples), lu(samples), phase(samples);
  for (int s = 0; s < samples; ++s) {
    lr[s] = std::log(fit.radii[s]);
    lu[s] = std::log(fit.max_abs_u[s]);
    phase[s] = kappa * fit.nodal_angle[s];
  }
  const LineFit g = least_squares(lr, lu);
  const LineFit a = least_squares(lr, phase);
  fit.gamma_fit = g.slope;
  fit.gamma_residual = g.rms;
  fit.alpha_fit = a.slope;
  fit.alpha_residual = a.rms;
  fit.max_arm_gap_error = *std::max_element(gap_err.begin(), gap_err.end());
  fit.amplitude_lo = 1e300;
  fit.amplitude_hi = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double scale = std::pow(fit.radii[s], -fit.gamma_fit);
    for (double e : envelopes[s]) {
      fit.amplitude_lo = std::min(fit.amplitude_lo, e * scale);
      fit.amplitude_hi = std::max(fit.amplitude_hi, e * scale);
    }
  }
  return fit;
}

}  // namespace spiral
