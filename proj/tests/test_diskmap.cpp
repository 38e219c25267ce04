#include <cmath>

#include "fixtures.hpp"
#include "spiral/diskmap.hpp"
#include "spiral/errors.hpp"
#include "test_helpers.hpp"

using namespace spiral;

namespace {

const DiskDensities& k4_disk() {
  static const DiskDensities d(fixtures::k4_alpha1(),
                               fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 3.0));
  return d;
}

}  // namespace

TEST_CASE("disk map round trip") {
  auto gen = testing_util::rng(41);
  std::uniform_real_distribution<double> ux(0.0, kTwoPi), uy(1e-3, 9.0);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(gen), y = uy(gen);
    const auto p = to_disk(x, y);
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(std::exp(-y)));
    const auto q = from_disk(p[0], p[1]);
    CHECK(std::abs(q[0] - x) < 1e-12);
    CHECK(std::abs(q[1] - y) < 1e-10);
  }
  CHECK_THROWS_AS(from_disk(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(from_disk(0.8, 0.8), DomainError);
}

TEST_CASE("densities are non-negative and segregated") {
  const auto& d = k4_disk();
  auto gen = testing_util::rng(42);
  std::uniform_real_distribution<double> ur(0.01, 0.94), ut(0.0, kTwoPi);
  int seen[4] = {0, 0, 0, 0};
  for (int i = 0; i < 400; ++i) {
    const double r = ur(gen), t = ut(gen);
    const auto u = d.densities_or_zero(r * std::cos(t), r * std::sin(t));
    int positive = 0;
    for (int s = 0; s < 4; ++s) {
      CHECK(u[s] >= 0.0);
      if (u[s] > 0.0) ++positive, ++seen[s];
    }
    CHECK(positive <= 1);
    const auto L = d.lift(r * std::cos(t), r * std::sin(t));
    if (positive == 1) CHECK(u[L.strip] > 0.0);
  }
  for (int s = 0; s < 4; ++s) CHECK(seen[s] > 0);
}

TEST_CASE("combined field equals the solution on the cover") {
  const auto& d = k4_disk();
  const auto& sol = d.solution();
  for (double y : {0.2, 1.0, 3.0})
    for (double x : {0.4, 2.2, 4.1, 5.9}) {
      const auto p = to_disk(x, y);
      const double v = sol.eval(x, y);
      // the lift may shift x by whole periods, which multiplies v by e^{2πα}
      const auto L = d.lift(p[0], p[1]);
      const double vl = sol.eval(L.x, L.y);
      CHECK(std::abs(d.combined(p[0], p[1]) - vl) <= 1e-9 * std::abs(vl) + 1e-12);
      CHECK((v > 0) == (vl > 0));
    }
}

TEST_CASE("points on a free boundary are not classified") {
  const auto& d = k4_disk();
  const double y = 0.8;
  const auto zs = d.nodal_positions(d.solution().profile(y));
  const auto p = to_disk(zs[1], y);
  CHECK_THROWS_AS(d.densities(p[0], p[1]), UnclassifiedPoint);
  for (double v : d.densities_or_zero(p[0], p[1])) CHECK(v == 0.0);
}

TEST_CASE("species count must match the nodal structure") {
  const auto setup = fixtures::k4_alpha1();
  const auto sol = fixtures::solve(fixtures::k3_ratios10(), uniform_traces(3, ArcShape::Bump), 0.0, 3.0);
  CHECK_THROWS_AS(DiskDensities(setup, sol), PreconditionFailed);
}

TEST_CASE("spiral fit recovers the exponent and pitch") {
  const SpiralFit f = spiral_fit(k4_disk(), 1e-3, 1e-1, 30);
  CHECK(f.gamma_expected == doctest::Approx(2.5));
  CHECK(std::abs(f.gamma_fit - 2.5) < 0.05);
  CHECK(std::abs(f.alpha_fit - 1.0) < 0.02);
  CHECK(f.max_arm_gap_error < 1e-6);
  CHECK(f.amplitude_lo > 0.0);
  CHECK(f.amplitude_hi < 1e4 * f.amplitude_lo);
  CHECK_THROWS_AS(spiral_fit(k4_disk(), 0.05, 0.1), InsufficientDecades);
  CHECK_THROWS_AS(spiral_fit(k4_disk(), 0.0, 0.1), PreconditionFailed);
}

TEST_CASE("spiral exponent does not depend on rotation") {
  const auto setup = fixtures::k4_alpha1();
  const auto t = uniform_traces(4, ArcShape::Sine);
  AssembleOptions opts;
  opts.max_truncation = 1024;
  double prev = 0.0;
  for (double omega : {-2.0, 0.0, 2.0}) {
    const DiskDensities d(setup, fixtures::solve(setup, t, 0.0, omega, opts));
    const double g = spiral_fit(d, 1e-3, 1e-1, 20).gamma_fit;
    CHECK(std::abs(g - 2.5) < 0.05);
    if (prev != 0.0) CHECK(std::abs(g - prev) < 0.05);
    prev = g;
  }
}
