#include <algorithm>
#include <cmath>

#include "spiral/errors.hpp"
#include "spiral/kernels.hpp"
#include "spiral/specfun.hpp"

namespace spiral {

namespace {

// Grid origin shift as a fraction of the spacing, irrational so that lines of
// symmetry (such as the real axis) never coincide with grid lines.
constexpr double kGridShift = 0.31830988618379067;

double arg_change(cplx a, cplx b) { return std::arg(b / a); }

// Argument increment of f along the segment a→b, subdividing while a single
// increment could be ambiguous.
double edge_increment(const std::function<ThetaValue(cplx)>& f, cplx za, cplx fa, cplx zb,
                      cplx fb, int depth) {
  const double d = arg_change(fa, fb);
  if (std::abs(d) < 0.5 * kPi || depth >= 10) return d;
  const cplx zm = 0.5 * (za + zb);
  const cplx fm = f(zm).value;
  if (fm == cplx(0.0)) return d;
  return edge_increment(f, za, fa, zm, fm, depth + 1) + edge_increment(f, zm, fm, zb, fb, depth + 1);
}

struct Polish {
  bool ok = false;
  cplx z;
  std::string reason;
};

Polish newton(const std::function<ThetaValue(cplx)>& f, cplx z, double max_step, double target,
              int max_iter) {
  Polish p;
  for (int it = 0; it < max_iter; ++it) {
    const ThetaValue v = f(z);
    if (std::abs(v.value) == 0.0) break;
    if (v.derivative == cplx(0.0)) {
      p.reason = "vanishing derivative during Newton";
      p.z = z;
      return p;
    }
    cplx step = v.value / v.derivative;
    const double as = std::abs(step);
    if (as > max_step) step *= max_step / as;
    z -= step;
    if (as <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  p.z = z;
  const double res = std::abs(f(z).value);
  if (!(res <= target)) {
    p.reason = "Newton residual " + std::to_string(res) + " above target " + std::to_string(target);
    return p;
  }
  p.ok = true;
  return p;
}

}  // namespace

ZeroReport find_analytic_zeros(const std::function<ThetaValue(cplx)>& f, const Rect& region,
                               const ZeroSearchOptions& opts) {
  if (!(region.re_max >= region.re_min && region.im_max >= region.im_min))
    throw PreconditionFailed("find_analytic_zeros: empty region");
  const double h = opts.spacing;
  const auto axis = [h](double lo, double hi) {
    std::vector<double> v;
    for (double t = lo - (1.0 - kGridShift) * h; t <= hi + h; t += h) v.push_back(t);
    return v;
  };
  const std::vector<double> xs = axis(region.re_min, region.re_max);
  const std::vector<double> ys = axis(region.im_min, region.im_max);
  const auto exec = opts.parallel ? kernels::Exec::Parallel : kernels::Exec::Serial;
  const auto grid = kernels::sample_grid<cplx>(
      xs, ys, [&f](double x, double y) { return f(cplx(x, y)).value; }, exec);

  ZeroReport report;
  const std::size_t nx = xs.size(), ny = ys.size();
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      if (region.contains(cplx(xs[i], ys[j])))
        report.sup_abs = std::max(report.sup_abs, std::abs(grid.at(i, j)));
  if (report.sup_abs == 0.0)
    for (const cplx& v : grid.values) report.sup_abs = std::max(report.sup_abs, std::abs(v));
  const double target = opts.residual_rel * report.sup_abs;

  // winding number of every cell
  std::vector<int> winding((nx - 1) * (ny - 1), 0);
  kernels::for_each_index(
      std::ptrdiff_t(ny - 1),
      [&](std::ptrdiff_t jj) {
        const std::size_t j = std::size_t(jj);
        for (std::size_t i = 0; i + 1 < nx; ++i) {
          const cplx z[4] = {cplx(xs[i], ys[j]), cplx(xs[i + 1], ys[j]), cplx(xs[i + 1], ys[j + 1]),
                             cplx(xs[i], ys[j + 1])};
          const cplx v[4] = {grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1),
                             grid.at(i, j + 1)};
          bool degenerate = false;
          for (const cplx& c : v) degenerate = degenerate || c == cplx(0.0);
          if (degenerate) {
            winding[j * (nx - 1) + i] = 1;
            continue;
          }
          double total = 0.0;
          for (int e = 0; e < 4; ++e) total += edge_increment(f, z[e], v[e], z[(e + 1) % 4], v[(e + 1) % 4], 0);
          winding[j * (nx - 1) + i] = int(std::lround(total / kTwoPi));
        }
      },
      exec);

  struct Seed {
    cplx z;
    bool from_winding;
    std::size_t i, j;
  };
  std::vector<Seed> seeds;
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i)
      if (winding[j * (nx - 1) + i] != 0)
        seeds.push_back({cplx(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])), true, i, j});
  for (std::size_t j = 1; j + 1 < ny; ++j)
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double a = std::abs(grid.at(i, j));
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj)
        for (int di = -1; di <= 1 && minimum; ++di)
          if ((di || dj) && std::abs(grid.at(i + di, j + dj)) < a) minimum = false;
      if (minimum) seeds.push_back({cplx(xs[i], ys[j]), false, i, j});
    }

  std::vector<Polish> polished(seeds.size());
  kernels::for_each_index(
      std::ptrdiff_t(seeds.size()),
      [&](std::ptrdiff_t s) {
        const Seed& seed = seeds[std::size_t(s)];
        Polish p = newton(f, seed.z, 0.25 * h, target, opts.newton_max_iter);
        if (seed.from_winding) {
          // the zero must stay within the cell's neighbourhood, else retry
          // from the quarter-cell centres
          const auto near_cell = [&](cplx z) {
            return std::abs(z.real() - seed.z.real()) <= 1.5 * h &&
                   std::abs(z.imag() - seed.z.imag()) <= 1.5 * h;
          };
          for (int q = 0; q < 4 && (!p.ok || !near_cell(p.z)); ++q) {
            const cplx start = seed.z + cplx((q % 2 ? 0.25 : -0.25) * h, (q / 2 ? 0.25 : -0.25) * h);
            p = newton(f, start, 0.1 * h, target, opts.newton_max_iter);
          }
        }
        polished[std::size_t(s)] = p;
      },
      exec);

  std::vector<cplx> found;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const Polish& p = polished[s];
    if (!p.ok) {
      if (seeds[s].from_winding) report.dropped.push_back({seeds[s].z, p.reason});
      continue;
    }
    if (!region.contains(p.z, 1e-9 * (1.0 + std::abs(p.z)))) continue;
    bool dup = false;
    for (const cplx& z : found) dup = dup || std::abs(z - p.z) <= 1e-7 * (1.0 + std::abs(z));
    if (!dup) found.push_back(p.z);
  }
  std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  report.zeros = std::move(found);
  return report;
}

}  // namespace spiral
