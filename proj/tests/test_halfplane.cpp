#include <cmath>

#include "fixtures.hpp"
#include "spiral/errors.hpp"
#include "spiral/halfplane.hpp"
#include "test_helpers.hpp"

using namespace spiral;

TEST_CASE("row sampler matches the pointwise reference") {
  const auto sol = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 3.0);
  const auto xs = kernels::linspace(0.0, kTwoPi, 33), ys = kernels::linspace(0.05, 3.0, 17);
  const auto a = sample_v(sol, xs, ys), b = sample_v_reference(sol, xs, ys);
  const auto s = sample_v(sol, xs, ys, kernels::Exec::Serial);
  double peak = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    peak = std::max(peak, std::abs(b.values[i]));
    diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
    CHECK(a.values[i] == s.values[i]);
  }
  CHECK(diff < 1e-11 * peak);
}

TEST_CASE("PDE residual is small and second order") {
  for (double omega : {0.0, 3.0, -2.0}) {
    const auto sol = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 1.0, omega);
    const auto r1 = pde_residual(sol, 0.0, 1.0, 0.3, 1.3, 1e-2);
    const auto r2 = pde_residual(sol, 0.0, 1.0, 0.3, 1.3, 5e-3);
    CHECK(r1.relative() < 1e-3);
    CHECK(std::log2(r1.relative() / r2.relative()) == doctest::Approx(2.0).epsilon(0.1));
    const auto rs = pde_residual(sol, 0.0, 1.0, 0.3, 1.3, 1e-2, kernels::Exec::Serial);
    CHECK(rs.max_abs == r1.max_abs);
  }
  const auto sol = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 1.0);
  CHECK_THROWS_AS(pde_residual(sol, 0.0, 1.0, 0.0, 1.0, 1e-2), PreconditionFailed);
}

TEST_CASE("quasi-periodicity in x") {
  for (const auto& setup : {fixtures::k4_alpha1(), fixtures::k3_ratios10()}) {
    const auto sol = fixtures::solve(setup, uniform_traces(setup.K, ArcShape::Bump), 0.0, 3.0);
    auto gen = testing_util::rng(31);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi), uy(0.05, 4.0);
    for (int i = 0; i < 30; ++i) {
      const double x = ux(gen), y = uy(gen);
      const double a = sol.eval(x + kTwoPi, y), b = sol.period_factor() * sol.eval(x, y);
      CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + std::abs(b)));
    }
  }
}

TEST_CASE("boundary values reproduce the scaled traces") {
  const auto setup = fixtures::k4_alpha1();
  const auto t = uniform_traces(4, ArcShape::Sine);
  const ScalingSolution s = solve_scaling(setup, t);
  // kinks at the nodes leave O(1/k²) coefficients, so allow a longer series
  AssembleOptions opts;
  opts.max_truncation = 1024;
  const auto sol = HalfPlaneSolution::assemble(s.compat, 1, 0.0, 2.0, opts);
  double peak = 0.0, err = 0.0;
  for (double x : kernels::linspace(0.05, kTwoPi - 0.05, 200)) {
    peak = std::max(peak, std::abs(s.compat.Phi(x)));
    err = std::max(err, std::abs(sol.eval(x, 0.0) - s.compat.Phi(x)));
  }
  CHECK(err < 1e-3 * peak);
}

TEST_CASE("gradient agrees with central differences") {
  const auto sol = fixtures::solve(fixtures::k3_ratios10(), uniform_traces(3, ArcShape::Bump), 0.5, -3.0);
  for (double y : {0.2, 1.0, 2.5})
    for (double x : {0.3, 2.0, 5.0}) {
      const double h = 1e-6;
      const auto g = sol.grad(x, y);
      const double gx = (sol.eval(x + h, y) - sol.eval(x - h, y)) / (2 * h);
      const double gy = (sol.eval(x, y + h) - sol.eval(x, y - h)) / (2 * h);
      CHECK(std::abs(g[0] - gx) < 1e-6 * (1 + std::abs(gx)));
      CHECK(std::abs(g[1] - gy) < 1e-6 * (1 + std::abs(gy)));
    }
}

TEST_CASE("coefficient layout and leading frequency") {
  const auto sol4 = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 3.0);
  CHECK(sol4.first_index() == 2);
  CHECK(sol4.zeros_per_period() == 4);
  CHECK(sol4.coefficients()[0] == cplx(0.0));
  const auto sol3 = fixtures::solve(fixtures::k3_ratios10(), uniform_traces(3, ArcShape::Bump), 0.0, 3.0);
  CHECK(sol3.sheets() == 2);
  CHECK(sol3.first_index() == 3);
  CHECK(sol3.leading_frequency() == 1.5);
  CHECK(sol3.zeros_per_period() == 3);
  CHECK(sol3.period_factor() < 0.0);
  for (int k = 2; k <= sol3.truncation(); k += 2) CHECK(sol3.coefficients()[k - 1] == cplx(0.0));
}

TEST_CASE("sign changes per period equal 2n") {
  const auto sol = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 3.0);
  for (double y : {0.05, 0.2, 0.7, 1.5, 3.0, 6.0, 8.0}) CHECK(count_sign_changes(sol, y) == 4);
  const auto sol3 = fixtures::solve(fixtures::k3_ratios10(), uniform_traces(3, ArcShape::Bump), 0.0, -3.0);
  for (double y : {0.05, 0.5, 2.0, 8.0}) CHECK(count_sign_changes(sol3, y) == 3);
}

TEST_CASE("nodal curves are disjoint with the predicted asymptotic slope") {
  const auto sol = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 3.0);
  const auto curves = trace_nodal_curves(sol, 0.05, 8.0);
  REQUIRE(curves.size() == 4);
  for (std::size_t j = 0; j < curves.size(); ++j) {
    CHECK(curves[j].slope == doctest::Approx(-0.5).epsilon(1e-2));
    CHECK(curves[j].index == int(j));
    CHECK(curves[j].beta == doctest::Approx(curves[0].beta));
  }
  for (double y : kernels::linspace(0.05, 8.0, 100)) {
    for (std::size_t j = 0; j + 1 < curves.size(); ++j) CHECK(curves[j].x_at(y) < curves[j + 1].x_at(y));
    CHECK(curves.back().x_at(y) < curves.front().x_at(y) + kTwoPi);
    for (const auto& c : curves) CHECK(std::abs(sol.eval(c.x_at(y), y)) < 1e-3 * std::abs(sol.grad(c.x_at(y), y)[0]));
  }
}

TEST_CASE("tracing refuses large mu by default") {
  const auto sol = fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 10.0, 1.0);
  CHECK_THROWS_AS(trace_nodal_curves(sol, 0.05, 4.0), PreconditionFailed);
}

TEST_CASE("explicit truncation too small is reported") {
  AssembleOptions opts;
  opts.truncation = 12;
  CHECK_THROWS_AS(fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 1.0, opts),
                  TruncationTooSmall);
  opts.truncation = 3;
  CHECK_THROWS_AS(fixtures::solve(fixtures::k4_alpha1(), uniform_traces(4, ArcShape::Bump), 0.0, 1.0, opts),
                  PreconditionFailed);
}

TEST_CASE("mu bound and resonance") {
  // first zero of Θ_{2−i} with positive imaginary part gives a resonant k = 2 mode
  const auto rep = theta_zeros(cplx(2.0, -1.0), Rect{-40.0, 0.0, 1.0, 40.0});
  REQUIRE(!rep.zeros.empty());
  const cplx lam = rep.zeros.front();
  const double omega = lam.imag() / 2.0, mu = omega - lam.real();
  REQUIRE(mu > (kJ01 + 1.0) * (kJ01 + 1.0));
  const auto t = uniform_traces(4, ArcShape::Bump);
  CHECK_THROWS_AS(fixtures::solve(fixtures::k4_alpha1(), t, mu, omega), PreconditionFailed);
  AssembleOptions opts;
  opts.waive_mu_bound = true;
  try {
    (void)fixtures::solve(fixtures::k4_alpha1(), t, mu, omega, opts);
    FAIL("expected ResonantMode");
  } catch (const ResonantMode& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("from_coefficients builds a single harmonic") {
  // v = e^{αx}Re(e^{2ix}X_2(y)) with μ = ω = 0 is e^{αx}e^{−2y}cos(2x + αy)
  const auto sol = HalfPlaneSolution::from_coefficients(0.4, 0.0, 0.0, {0.0, 0.5});
  CHECK(sol.first_index() == 2);
  for (double x : {0.1, 1.3, 4.0})
    for (double y : {0.0, 0.5, 2.0})
      CHECK(sol.eval(x, y) == doctest::Approx(std::exp(0.4 * x - 2 * y) * std::cos(2 * x + 0.4 * y)).epsilon(1e-12));
}
