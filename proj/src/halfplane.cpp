#include "spiral/halfplane.hpp"

#include <algorithm>
#include <cmath>

#include "spiral/errors.hpp"

namespace spiral {

namespace {

// Σ_k φ_k X_k(y) e^{ikθ} for one profile array, with e^{ikθ} advanced by
// multiplication and re-anchored every 32 steps.
template <class Weight>
cplx harmonic_sum(const std::vector<cplx>& a, int first, double theta, Weight&& weight) {
  cplx sum = 0.0;
  const cplx step = std::polar(1.0, theta);
  cplx e = 0.0;
  for (int k = first; k <= int(a.size()); ++k) {
    if ((k - first) % 32 == 0)
      e = std::polar(1.0, double(k) * theta);
    else
      e *= step;
    sum += weight(k) * a[std::size_t(k - 1)] * e;
  }
  return sum;
}

double sup_on_samples(const Mode& m) {
  double s = 0.0;
  for (int i = 0; i <= 200; ++i) s = std::max(s, std::abs(m.eval(5.0 * i / 200.0)));
  return s;
}

}  // namespace

void HalfPlaneSolution::build_modes(const AssembleOptions& opts) {
  const int N = int(coeffs_.size());
  std::vector<Mode> modes(N);
  kernels::for_each_index(N, [&](std::ptrdiff_t i) {
    ModeParams p{int(i) + 1, alpha_, mu_, omega_, sheets_};
    modes[std::size_t(i)] = Mode::build(p, opts.resonance_tol, opts.series);
  });
  modes_ = std::move(modes);
}

HalfPlaneSolution HalfPlaneSolution::from_coefficients(double alpha, double mu, double omega,
                                                       const std::vector<cplx>& coeffs, int sheets,
                                                       const AssembleOptions& opts) {
  if (sheets != 1 && sheets != 2) throw PreconditionFailed("sheets must be 1 or 2");
  HalfPlaneSolution s;
  s.alpha_ = alpha;
  s.mu_ = mu;
  s.omega_ = omega;
  s.sheets_ = sheets;
  s.coeffs_ = coeffs;
  s.n_ = 0;
  for (std::size_t k = 0; k < coeffs.size() && s.n_ == 0; ++k)
    if (coeffs[k] != cplx(0.0)) s.n_ = int(k) + 1;
  if (s.n_ == 0) throw PreconditionFailed("all coefficients vanish");
  s.build_modes(opts);
  return s;
}

HalfPlaneSolution HalfPlaneSolution::assemble(const CompatResult& compat, int sheets, double mu,
                                              double omega, const AssembleOptions& opts) {
  if (sheets != 1 && sheets != 2) throw PreconditionFailed("sheets must be 1 or 2");
  const double bound = (kJ01 + 1.0) * (kJ01 + 1.0);
  if (!(mu < bound) && !opts.waive_mu_bound)
    throw PreconditionFailed("mu must stay below (j01+1)^2 unless the bound is waived");
  if (!std::isfinite(mu) || !std::isfinite(omega)) throw PreconditionFailed("mu and omega must be finite");
  const int n = compat.n;

  // coefficients of e^{−αx}Φ, computed in blocks until the decay rule holds
  std::vector<cplx> phi;
  double total = 0.0;
  int N = 0;
  const int window = std::max(8, 2 * int(compat.c.size()));
  int small_run = 0;
  const int cap = opts.truncation > 0 ? opts.truncation : opts.max_truncation;
  const int block = opts.truncation > 0 ? cap : 64;
  if (opts.truncation > 0 && opts.truncation < n + 8)
    throw PreconditionFailed("truncation must be at least n+8");
  while (N == 0 && int(phi.size()) < cap) {
    const int start = int(phi.size()) + 1;
    const int stop = std::min(cap, start + block - 1);
    phi.resize(stop);
    kernels::for_each_index(stop - start + 1, [&](std::ptrdiff_t i) {
      const int k = start + int(i);
      cplx s = 0.0;
      for (std::size_t m = 0; m < compat.c.size(); ++m)
        s += compat.c[m] * arc_coefficient(compat.traces.arcs[m], compat.alpha, double(k));
      phi[std::size_t(k - 1)] = s;
    });
    if (opts.truncation > 0) {
      N = opts.truncation;
      break;
    }
    // symmetric traces zero out whole residue classes, so a single small
    // coefficient says nothing; wait for a run of `window` of them
    for (int k = start; k <= stop; ++k) {
      total += 2.0 * std::abs(phi[k - 1]);
      small_run = 2.0 * std::abs(phi[k - 1]) < opts.truncation_rel_tol * total ? small_run + 1 : 0;
      if (k >= n + window && small_run >= window) {
        N = k;
        break;
      }
    }
  }
  const bool capped = N == 0;
  if (capped) N = cap;
  phi.resize(N);
  total = 0.0;
  for (const cplx& v : phi) total += 2.0 * std::abs(v);

  // Nothing survives below the first active index. For two
  // sheets only odd indices (half-integer frequencies) survive.
  double stray = 0.0;
  for (int k = 1; k <= N; ++k) {
    const bool drop = k < n || (sheets == 2 && k % 2 == 0);
    if (drop) {
      stray = std::max(stray, std::abs(phi[k - 1]));
      phi[k - 1] = 0.0;
    }
  }
  if (stray > 1e-8 * total)
    throw PreconditionFailed("Fourier coefficients below the first active index do not vanish");

  HalfPlaneSolution s;
  s.alpha_ = compat.alpha / sheets;
  s.mu_ = mu;
  s.omega_ = omega;
  s.sheets_ = sheets;
  s.n_ = n;
  s.coeffs_ = std::move(phi);
  s.build_modes(opts);
  if (capped || opts.truncation > 0) {
    // the last coefficient alone can sit in a vanishing residue class
    double tail = 0.0;
    for (int k = std::max(1, N - window + 1); k <= N; ++k)
      if (s.coeffs_[k - 1] != 0.0)
        tail = std::max(tail, 2.0 * std::abs(s.coeffs_[k - 1]) * sup_on_samples(s.modes_[k - 1]));
    if (tail > opts.series_tail_tol * total)
      throw TruncationTooSmall("truncation N=" + std::to_string(N) + " leaves a tail of " +
                               std::to_string(tail / total) + " relative");
  }
  return s;
}

HalfPlaneSolution::Profile HalfPlaneSolution::profile(double y) const {
  Profile p;
  p.y = y;
  // X_k decays like e^{−ky/s}; terms below e^{−40} of the leading one are dropped
  std::size_t N = coeffs_.size();
  if (y > 0.0) N = std::min<std::size_t>(N, std::size_t(n_ + std::ceil(40.0 * sheets_ / y)));
  p.value.assign(N, 0.0);
  p.slope.assign(N, 0.0);
  for (std::size_t i = std::size_t(n_ - 1); i < N; ++i) {
    if (coeffs_[i] == cplx(0.0)) continue;
    const auto [x, dx] = modes_[i].eval_with_derivative(y);
    p.value[i] = coeffs_[i] * x;
    p.slope[i] = coeffs_[i] * dx;
  }
  return p;
}

double HalfPlaneSolution::eval(const Profile& p, double x) const {
  const double theta = x / sheets_;
  const cplx s = harmonic_sum(p.value, n_, theta, [](int) { return 1.0; });
  return std::exp(alpha_ * x) * 2.0 * s.real();
}

std::array<double, 3> HalfPlaneSolution::eval_with_grad(const Profile& p, double x) const {
  const double theta = x / sheets_;
  const double inv = 1.0 / sheets_;
  const cplx s = harmonic_sum(p.value, n_, theta, [](int) { return 1.0; });
  const cplx sx = harmonic_sum(p.value, n_, theta, [inv](int k) { return cplx(0.0, k * inv); });
  const cplx sy = harmonic_sum(p.slope, n_, theta, [](int) { return 1.0; });
  const double e = std::exp(alpha_ * x);
  const double v = e * 2.0 * s.real();
  return {v, alpha_ * v + e * 2.0 * sx.real(), e * 2.0 * sy.real()};
}

std::array<double, 2> HalfPlaneSolution::grad(const Profile& p, double x) const {
  const auto r = eval_with_grad(p, x);
  return {r[1], r[2]};
}

double HalfPlaneSolution::eval(double x, double y) const { return eval(profile(y), x); }

std::array<double, 2> HalfPlaneSolution::grad(double x, double y) const { return grad(profile(y), x); }

double HalfPlaneSolution::period_factor() const {
  return (sheets_ == 2 ? -1.0 : 1.0) * std::exp(kTwoPi * alpha_);
}

kernels::Grid<double> sample_v(const HalfPlaneSolution& sol, const std::vector<double>& xs,
                               const std::vector<double>& ys, kernels::Exec exec) {
  kernels::Grid<double> g{xs, ys, std::vector<double>(xs.size() * ys.size())};
  const std::size_t nx = xs.size();
  kernels::for_each_index(
      std::ptrdiff_t(ys.size()),
      [&](std::ptrdiff_t j) {
        const auto p = sol.profile(ys[std::size_t(j)]);
        for (std::size_t i = 0; i < nx; ++i) g.values[std::size_t(j) * nx + i] = sol.eval(p, xs[i]);
      },
      exec);
  return g;
}

kernels::Grid<double> sample_v_reference(const HalfPlaneSolution& sol, const std::vector<double>& xs,
                                         const std::vector<double>& ys) {
  kernels::Grid<double> g{xs, ys, std::vector<double>(xs.size() * ys.size())};
  const auto& phi = sol.coefficients();
  const auto& modes = sol.modes();
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k)
        if (phi[k] != cplx(0.0))
          s += phi[k] * modes[k].eval(ys[j]) * std::polar(1.0, double(k + 1) * xs[i] / sol.sheets());
      g.at(i, j) = std::exp(sol.alpha() * xs[i]) * 2.0 * s.real();
    }
  return g;
}

kernels::Residual pde_residual(const HalfPlaneSolution& sol, double x0, double x1, double y0, double y1,
                               double h, kernels::Exec exec) {
  if (!(h > 0.0 && h <= 1e-2 + 1e-15)) throw PreconditionFailed("pde_residual: spacing must lie in (0, 1e-2]");
  if (!(y0 - h >= 0.0)) throw PreconditionFailed("pde_residual: grid must stay in y >= 0");
  const auto nx = std::size_t(std::llround((x1 - x0) / h));
  const auto ny = std::size_t(std::llround((y1 - y0) / h));
  std::vector<double> xs(nx + 3), ys(ny + 3);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x0 + (double(i) - 1.0) * h;
  for (std::size_t j = 0; j < ys.size(); ++j) ys[j] = y0 + (double(j) - 1.0) * h;
  const auto g = sample_v(sol, xs, ys, exec);
  return kernels::stencil_residual(g, h, sol.mu(), sol.omega(), exec);
}

}  // namespace spiral
