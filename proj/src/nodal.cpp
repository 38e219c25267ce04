#include <algorithm>
#include <cmath>

#include "spiral/errors.hpp"
#include "spiral/halfplane.hpp"

namespace spiral {

namespace {

struct NewtonOutcome {
  bool ok = false;
  double x = 0.0;
};

NewtonOutcome newton_x(const HalfPlaneSolution& sol, const HalfPlaneSolution::Profile& p, double x,
                       double tol_rel, int max_iter) {
  const double kappa = sol.leading_frequency();
  for (int it = 0; it <= max_iter; ++it) {
    const auto r = sol.eval_with_grad(p, x);
    if (r[1] == 0.0 || !std::isfinite(r[1])) return {};
    if (std::abs(r[0]) <= tol_rel * std::abs(r[1]) / kappa) return {true, x};
    if (it == max_iter) break;
    const double step = r[0] / r[1];
    x -= step;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(x))) return {true, x};
  }
  return {};
}

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Zeros of v(·, y) in [x0, x0 + 2π) found by dense sampling and polished.
std::vector<double> zeros_in_window(const HalfPlaneSolution& sol, const HalfPlaneSolution::Profile& p,
                                    double x0, int samples) {
  std::vector<double> xs(samples + 1), vs(samples + 1);
  for (int j = 0; j <= samples; ++j) {
    xs[j] = x0 + kTwoPi * j / samples;
    vs[j] = sol.eval(p, xs[j]);
  }
  std::vector<double> roots;
  for (int j = 0; j < samples; ++j) {
    if (sign_of(vs[j]) * sign_of(vs[j + 1]) >= 0) continue;
    double a = xs[j], b = xs[j + 1], fa = vs[j];
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      const double fm = sol.eval(p, m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if (sign_of(fm) == sign_of(fa))
        a = m, fa = fm;
      else
        b = m;
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

}  // namespace

double refine_nodal_x(const HalfPlaneSolution& sol, const HalfPlaneSolution::Profile& p, double x_start,
                      double tol_rel) {
  const auto r = newton_x(sol, p, x_start, tol_rel, 60);
  if (!r.ok) throw CurveLost("Newton correction failed at y=" + std::to_string(p.y));
  return r.x;
}

int count_sign_changes(const HalfPlaneSolution& sol, double y, int samples) {
  if (!(y > 0.0)) throw PreconditionFailed("count_sign_changes needs y > 0");
  const auto p = sol.profile(y);
  // start off any symmetry point of the grid
  const double x0 = 1e-3 * kTwoPi / samples * 0.7071067811865476;
  std::vector<double> xs(samples + 1), vs(samples + 1);
  kernels::for_each_index(samples + 1, [&](std::ptrdiff_t j) {
    xs[j] = x0 + kTwoPi * double(j) / samples;
    vs[j] = sol.eval(p, xs[j]);
  });
  int count = 0;
  int last = 0;
  for (int j = 0; j <= samples; ++j) {
    const int s = sign_of(vs[j]);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  // hidden pairs of crossings near local minima of |v|
  for (int j = 1; j < samples; ++j) {
    const double a = std::abs(vs[j]);
    if (!(a < std::abs(vs[j - 1]) && a < std::abs(vs[j + 1]))) continue;
    if (sign_of(vs[j - 1]) != sign_of(vs[j]) || sign_of(vs[j + 1]) != sign_of(vs[j])) continue;
    const int sub = 64;
    int prev = sign_of(vs[j - 1]);
    int extra = 0;
    for (int i = 1; i < 2 * sub; ++i) {
      const int s = sign_of(sol.eval(p, xs[j - 1] + (xs[j + 1] - xs[j - 1]) * i / (2.0 * sub)));
      if (s != 0 && s != prev) ++extra, prev = s;
    }
    count += extra;
  }
  return count;
}

double NodalCurve::x_at(double y) const {
  if (points.empty()) return intercept + slope * y;
  if (y <= points.front()[1]) return points.front()[0];
  if (y >= points.back()[1]) return points.back()[0] + slope * (y - points.back()[1]);
  const auto it = std::lower_bound(points.begin(), points.end(), y,
                                   [](const std::array<double, 2>& p, double v) { return p[1] < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double f = (y - lo[1]) / (hi[1] - lo[1]);
  return lo[0] + f * (hi[0] - lo[0]);
}

std::vector<NodalCurve> trace_nodal_curves(const HalfPlaneSolution& sol, double y_min, double y_max,
                                           const TraceOptions& opts) {
  if (!(y_min > 0.0) || !(y_max > y_min)) throw PreconditionFailed("trace_nodal_curves needs 0 < y_min < y_max");
  if (opts.require_mu_below_pi2 && !(sol.mu() < kPi * kPi))
    throw PreconditionFailed("nodal structure is only guaranteed for mu < pi^2");
  const double kappa = sol.leading_frequency();
  const int Z = sol.zeros_per_period();
  const auto top = sol.profile(y_max);
  const std::vector<double> starts = zeros_in_window(sol, top, 0.0, 4096);
  if (int(starts.size()) != Z)
    throw CurveLost("found " + std::to_string(starts.size()) + " zeros at y_max, expected " + std::to_string(Z));

  std::vector<NodalCurve> curves(starts.size());
  kernels::for_each_index(std::ptrdiff_t(starts.size()), [&](std::ptrdiff_t c) {
    double x = refine_nodal_x(sol, top, starts[std::size_t(c)], opts.curve_tol);
    double y = y_max;
    auto p = top;
    std::vector<std::array<double, 2>> pts{{x, y}};
    double step = opts.max_step;
    while (y > y_min) {
      const auto g = sol.eval_with_grad(p, x);
      const double dxdy = -g[2] / g[1];
      int halvings = 0;
      for (;;) {
        const double h = std::min(step, y - y_min);
        const double y_new = (h == y - y_min) ? y_min : y - h;
        const double x_pred = x - dxdy * h;
        auto p_new = sol.profile(y_new);
        const auto r = newton_x(sol, p_new, x_pred, opts.curve_tol, 12);
        if (r.ok && std::abs(r.x - x_pred) < 0.1 * kPi / kappa && std::abs(r.x - x) < 0.5 * kPi / kappa) {
          x = r.x;
          y = y_new;
          p = std::move(p_new);
          pts.push_back({x, y});
          step = std::min(opts.max_step, 2.0 * h);
          break;
        }
        step = 0.5 * h;
        if (++halvings > opts.max_halvings)
          throw CurveLost("nodal curve " + std::to_string(c) + " lost near y=" + std::to_string(y));
      }
    }
    std::reverse(pts.begin(), pts.end());
    curves[std::size_t(c)].points = std::move(pts);
  });

  // Curve 0: v increases across it (strip 1 carries v > 0) and its lower end
  // sits closest to x = 0. The others follow within one period.
  // A 2π shift multiplies v by the period factor, which is negative for an
  // odd number of species, so orientation is judged after the shift.
  const bool flips = sol.period_factor() < 0.0;
  double base = 0.0, best = 1e300;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& q = curves[c].points.front();
    const auto g = sol.eval_with_grad(sol.profile(q[1]), q[0]);
    const long m = std::lround(q[0] / kTwoPi);
    const double vx = (flips && m % 2 != 0) ? -g[1] : g[1];
    const double d = std::abs(q[0] - kTwoPi * double(m));
    if (vx > 0.0 && d < best) best = d, base = q[0] - kTwoPi * double(m);
  }
  for (auto& cv : curves) {
    const double bottom = cv.points.front()[0];
    const double shift = -kTwoPi * std::floor((bottom - base + 1e-9) / kTwoPi);
    for (auto& q : cv.points) q[0] += shift;
  }
  const double y_cut = y_max - opts.fit_fraction * (y_max - y_min);
  for (auto& cv : curves) {
    double sy = 0, sx = 0, syy = 0, sxy = 0;
    int m = 0;
    for (const auto& q : cv.points)
      if (q[1] >= y_cut) sy += q[1], sx += q[0], syy += q[1] * q[1], sxy += q[0] * q[1], ++m;
    const double den = m * syy - sy * sy;
    cv.slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
    cv.intercept = (sx - cv.slope * sy) / std::max(m, 1);
    double rss = 0.0;
    for (const auto& q : cv.points)
      if (q[1] >= y_cut) {
        const double e = q[0] - cv.intercept - cv.slope * q[1];
        rss += e * e;
      }
    cv.fit_residual = std::sqrt(rss / std::max(m, 1));
  }
  std::sort(curves.begin(), curves.end(),
            [](const NodalCurve& a, const NodalCurve& b) { return a.points.front()[0] < b.points.front()[0]; });
  // common phase β from the first curve, index j for the rest
  const double alpha = sol.alpha();
  const auto line_value = [&](const NodalCurve& cv) {
    // αy + κx evaluated on the fitted line at the top of the range
    return alpha * y_max + kappa * (cv.intercept + cv.slope * y_max);
  };
  const double beta = line_value(curves.front());
  for (auto& cv : curves) {
    cv.index = int(std::lround((line_value(cv) - beta) / kPi));
    cv.beta = beta;
  }
  return curves;
}

}  // namespace spiral
