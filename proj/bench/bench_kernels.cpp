// Serial reference against the OpenMP path for the hot kernels.

#include <benchmark/benchmark.h>

#include <cmath>

#include "spiral/compat.hpp"
#include "spiral/halfplane.hpp"
#include "spiral/kernels.hpp"

using namespace spiral;

namespace {

const HalfPlaneSolution& solution() {
  static const HalfPlaneSolution sol = [] {
    const auto setup = setup_of(cyclic_ratio_matrix({std::exp(kTwoPi), 1.0, 1.0, 1.0}));
    const auto s = solve_scaling(setup, uniform_traces(4, ArcShape::Bump));
    return HalfPlaneSolution::assemble(s.compat, s.sheets, 0.0, 3.0);
  }();
  return sol;
}

kernels::Exec exec_of(const benchmark::State& st) {
  return st.range(0) ? kernels::Exec::Parallel : kernels::Exec::Serial;
}

void BM_SampleV(benchmark::State& st) {
  const auto xs = kernels::linspace(0.0, kTwoPi, 128), ys = kernels::linspace(0.05, 4.0, 64);
  const auto& sol = solution();
  for (auto _ : st) benchmark::DoNotOptimize(sample_v(sol, xs, ys, exec_of(st)));
}

void BM_SampleVReference(benchmark::State& st) {
  const auto xs = kernels::linspace(0.0, kTwoPi, 128), ys = kernels::linspace(0.05, 4.0, 64);
  const auto& sol = solution();
  for (auto _ : st) benchmark::DoNotOptimize(sample_v_reference(sol, xs, ys));
}

void BM_SampleGrid(benchmark::State& st) {
  const auto xs = kernels::linspace(0.0, 1.0, 512), ys = kernels::linspace(0.0, 1.0, 512);
  const auto f = [](double x, double y) { return std::sin(7 * x) * std::exp(-y) * std::cos(3 * x * y); };
  for (auto _ : st) benchmark::DoNotOptimize(kernels::sample_grid<double>(xs, ys, f, exec_of(st)));
}

void BM_FourierMatrix(benchmark::State& st) {
  const auto t = uniform_traces(6, ArcShape::Bump);
  for (auto _ : st) benchmark::DoNotOptimize(fourier_matrix(t, 0.7, exec_of(st)));
}

void BM_StencilResidual(benchmark::State& st) {
  const double h = 2e-3;
  const auto xs = kernels::linspace(0.0, 1.0, 501), ys = kernels::linspace(0.3, 1.3, 501);
  const auto g = sample_v(solution(), xs, ys);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::stencil_residual(g, h, 0.0, 3.0, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_SampleV)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleVReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleGrid)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierMatrix)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StencilResidual)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
