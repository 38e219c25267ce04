#include "spiral/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spiral::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
  return v;
}

Residual stencil_residual(const Grid<double>& g, double h, double mu, double omega, Exec exec) {
  const std::size_t nx = g.xs.size(), ny = g.ys.size();
  if (nx < 3 || ny < 3) return {};
  std::vector<Residual> rows(ny);
  for_each_index(
      std::ptrdiff_t(ny - 2),
      [&](std::ptrdiff_t jj) {
        const std::size_t j = std::size_t(jj) + 1;
        const double w = std::exp(-2.0 * g.ys[j]);
        Residual r;
        for (std::size_t i = 1; i + 1 < nx; ++i) {
          const double c = g.at(i, j);
          const double e = g.at(i + 1, j), west = g.at(i - 1, j);
          const double n = g.at(i, j + 1), s = g.at(i, j - 1);
          const double dxx = (e + west - 2.0 * c) / (h * h), dyy = (n + s - 2.0 * c) / (h * h);
          const double lap = dxx + dyy;
          const double drift = omega * w * (e - west) / (2.0 * h);
          const double react = mu * w * c;
          r.max_abs = std::max(r.max_abs, std::abs(-lap + drift - react));
          r.scale = std::max(r.scale, std::abs(dxx) + std::abs(dyy) + std::abs(drift) + std::abs(react));
        }
        rows[j] = r;
      },
      exec);
  Residual out;
  for (const auto& r : rows) {
    out.max_abs = std::max(out.max_abs, r.max_abs);
    out.scale = std::max(out.scale, r.scale);
  }
  return out;
}

}  // namespace spiral::kernels
