#pragma once

// Data-parallel loops shared by the solver modules. Every kernel has a
// serial path with the same arithmetic per element so the OpenMP results
// can be compared against it bit for bit.

#include <cstddef>
#include <exception>
#include <vector>

namespace spiral::kernels {

enum class Exec { Serial, Parallel };

int max_threads();
void set_threads(int n);  // n ≤ 0 keeps the OpenMP default

// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region
// are captured and the first one is rethrown on the calling thread.
template <class Body>
void for_each_index(std::ptrdiff_t n, Body&& body, Exec exec = Exec::Parallel) {
  if (exec == Exec::Serial || n < 2) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(spiral_kernel_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

// Row-major samples: values[j * xs.size() + i] belongs to (xs[i], ys[j]).
template <class T>
struct Grid {
  std::vector<double> xs, ys;
  std::vector<T> values;
  T& at(std::size_t i, std::size_t j) { return values[j * xs.size() + i]; }
  const T& at(std::size_t i, std::size_t j) const { return values[j * xs.size() + i]; }
};

template <class T, class F>
Grid<T> sample_grid(const std::vector<double>& xs, const std::vector<double>& ys, F&& f,
                    Exec exec = Exec::Parallel) {
  Grid<T> g{xs, ys, std::vector<T>(xs.size() * ys.size())};
  const std::size_t nx = xs.size();
  for_each_index(
      std::ptrdiff_t(ys.size()),
      [&](std::ptrdiff_t j) {
        for (std::size_t i = 0; i < nx; ++i) g.values[std::size_t(j) * nx + i] = f(xs[i], ys[j]);
      },
      exec);
  return g;
}

std::vector<double> linspace(double a, double b, std::size_t n);

struct Residual {
  double max_abs = 0.0;
  double scale = 0.0;  // largest sum of term magnitudes seen on the grid
  double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

// Five-point residual of −Δv + ωe^{−2y}v_x − μe^{−2y}v at the interior nodes
// of a uniformly spaced grid.
Residual stencil_residual(const Grid<double>& g, double h, double mu, double omega,
                          Exec exec = Exec::Parallel);

// Same residual from pointwise evaluations, one stencil at a time.
template <class F>
Residual stencil_residual_pointwise(F&& v, const std::vector<double>& xs,
                                    const std::vector<double>& ys, double h, double mu,
                                    double omega);

}  // namespace spiral::kernels

#include "spiral/kernels_impl.hpp"
