#pragma once

#include <algorithm>
#include <cmath>

namespace spiral::kernels {

template <class F>
Residual stencil_residual_pointwise(F&& v, const std::vector<double>& xs,
                                    const std::vector<double>& ys, double h, double mu,
                                    double omega) {
  Residual out;
  for (double y : ys) {
    const double w = std::exp(-2.0 * y);
    for (double x : xs) {
      const double c = v(x, y);
      const double e = v(x + h, y), west = v(x - h, y);
      const double n = v(x, y + h), s = v(x, y - h);
      const double dxx = (e + west - 2.0 * c) / (h * h), dyy = (n + s - 2.0 * c) / (h * h);
      const double lap = dxx + dyy;
      const double drift = omega * w * (e - west) / (2.0 * h);
      const double react = mu * w * c;
      out.max_abs = std::max(out.max_abs, std::abs(-lap + drift - react));
      out.scale = std::max(out.scale, std::abs(dxx) + std::abs(dyy) + std::abs(drift) + std::abs(react));
    }
  }
  return out;
}

}  // namespace spiral::kernels
