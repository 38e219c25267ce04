#include <cmath>

#include "spiral/compat.hpp"
#include "spiral/errors.hpp"
#include "test_helpers.hpp"

using namespace spiral;

namespace {

double low_mode_leak(const CompatResult& r, double& lead) {
  const auto Phi = [&](double x) { return r.Phi(x); };
  double total = 0.0, worst = 0.0;
  for (int k = 0; k <= r.n + 4; ++k) {
    const double a = std::abs(fourier_coefficient(Phi, r.alpha, double(k), r.traces.breakpoints(), 1e-12));
    total += a;
    if (k < r.n) worst = std::max(worst, a);
    if (k == r.n) lead = a;
  }
  lead /= total;
  return worst / total;
}

BoundaryTraces random_traces(std::mt19937_64& gen, int K) {
  std::uniform_real_distribution<double> u(0.6, 1.4);
  std::vector<double> w(K);
  double sum = 0.0;
  for (double& v : w) sum += (v = u(gen));
  std::vector<double> nodes{0.0};
  for (int m = 0; m < K; ++m) nodes.push_back(nodes.back() + kTwoPi * w[m] / sum);
  nodes.back() = kTwoPi;
  std::vector<ArcTrace> arcs(K);
  for (int m = 0; m < K; ++m) {
    arcs[m].shape = m % 3 == 0 ? ArcShape::Bump : (m % 3 == 1 ? ArcShape::Sine : ArcShape::PiecewiseLinear);
    arcs[m].amplitude = u(gen);
    if (arcs[m].shape == ArcShape::PiecewiseLinear) arcs[m].samples = {0.0, u(gen), u(gen), 0.0};
  }
  return make_traces(nodes, arcs);
}

}  // namespace

TEST_CASE("setup of a cyclic ratio matrix") {
  const auto s = setup_of(cyclic_ratio_matrix({std::exp(kTwoPi), 1.0, 1.0, 1.0}));
  CHECK(s.K == 4);
  CHECK(std::abs(s.alpha - 1.0) < 1e-14);
  CHECK(s.l[0] == 1.0);
  CHECK(std::abs(s.sigma - std::exp(kTwoPi)) < 1e-9 * std::exp(kTwoPi));
  const auto odd = setup_of(cyclic_ratio_matrix({10.0, 10.0, 10.0}));
  CHECK(std::abs(odd.alpha - std::log(1000.0) / kTwoPi) < 1e-14);
  CHECK(odd.sigma < 0.0);
  CHECK(std::abs(std::abs(odd.sigma) - 1000.0) < 1e-9);
}

TEST_CASE("setup rejects bad matrices") {
  CHECK_THROWS_AS(setup_of(Eigen::MatrixXd::Ones(2, 3)), InvalidMatrix);
  Eigen::MatrixXd a = cyclic_ratio_matrix({1.0, 1.0, 1.0, 1.0});
  a(1, 2) = -1.0;
  CHECK_THROWS_AS(setup_of(a), InvalidMatrix);
}

TEST_CASE("trace validation") {
  CHECK_THROWS_AS(make_traces({0.0, 2.0, 1.5, 4.0, kTwoPi}, std::vector<ArcTrace>(4)), InvalidTraces);
  CHECK_THROWS_AS(make_traces({0.0, 2.0, kTwoPi}, std::vector<ArcTrace>(3)), InvalidTraces);
  ArcTrace flat;
  flat.shape = ArcShape::PiecewiseLinear;
  flat.samples = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(make_traces({0.0, 3.0, kTwoPi}, {flat, ArcTrace{}}), InvalidTraces);
  const auto t = uniform_traces(4, ArcShape::Sine);
  CHECK(t.K() == 4);
  CHECK(t.eval(0.25 * kPi) > 0.99);
  CHECK(t.eval(0.5 * kPi) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Fourier matrix: serial and parallel agree bit for bit") {
  const auto t = uniform_traces(6, ArcShape::Bump);
  const auto a = fourier_matrix(t, 0.4, kernels::Exec::Serial);
  const auto b = fourier_matrix(t, 0.4, kernels::Exec::Parallel);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("arc coefficient matches a closed form for the sine arc") {
  // φ = sin(π(x−x0)/w) on [x0, x0+w]; ∫ e^{−sx}φ = (π/w)(e^{−s x0} + e^{−s x1})/(s² + (π/w)²)
  ArcTrace a;
  a.x0 = 0.5;
  a.x1 = 2.0;
  a.shape = ArcShape::Sine;
  for (double k : {0.0, 1.0, 3.0, 7.0}) {
    const cplx s(0.3, k);
    const double q = kPi / 1.5;
    const cplx want = q * (std::exp(-s * 0.5) + std::exp(-s * 2.0)) / (s * s + q * q) / kTwoPi;
    CHECK(std::abs(arc_coefficient(a, 0.3, k) - want) < 1e-13);
  }
}

TEST_CASE("closed-form arc coefficients agree with adaptive quadrature") {
  ArcTrace sine, pl;
  sine.x0 = pl.x0 = 1.0;
  sine.x1 = pl.x1 = 3.5;
  sine.shape = ArcShape::Sine;
  sine.amplitude = 0.7;
  pl.shape = ArcShape::PiecewiseLinear;
  pl.samples = {0.0, 1.0, 0.4, 0.0};
  for (const ArcTrace* arc : {&sine, &pl})
    for (double alpha : {-1.0, 0.0, 1.0})
      for (double k : {0.0, 1.0, 2.0, 5.0, 40.0}) {
        const auto f = [&](double x) { return (*arc)(x); };
        std::vector<double> cuts{arc->x0, arc->x1};
        for (double x : arc->kinks()) cuts.push_back(x);
        const cplx want = fourier_coefficient(f, alpha, k, cuts, 1e-12);
        CHECK(std::abs(arc_coefficient(*arc, alpha, k) - want) < 1e-11 * (1.0 + std::abs(want)));
      }
}

TEST_CASE("symmetric four species give equal scalings") {
  Eigen::MatrixXd a(4, 4);
  a << 0, 2, 1, 2, 2, 0, 2, 1, 1, 2, 0, 2, 2, 1, 2, 0;
  for (ArcShape shape : {ArcShape::Bump, ArcShape::Sine}) {
    const auto r = compat_solve(setup_of(a), uniform_traces(4, shape));
    for (double s : r.sbar) CHECK(std::abs(s - 1.0) < 1e-6);
  }
}

TEST_CASE("compatibility: alternation, vanishing low modes, live leading mode") {
  auto gen = testing_util::rng(21);
  std::uniform_real_distribution<double> al(-1.2, 1.2);
  for (int trial = 0; trial < 8; ++trial) {
    const int K = trial % 2 == 0 ? 4 : 6;
    std::vector<double> ratios(K, 1.0);
    ratios[0] = std::exp(kTwoPi * al(gen));
    const auto setup = setup_of(cyclic_ratio_matrix(ratios));
    const auto r = compat_solve(setup, random_traces(gen, K));
    for (int m = 0; m < K; ++m) {
      CHECK(r.sbar[m] > 0.0);
      CHECK((m % 2 == 0 ? r.c[m] > 0.0 : r.c[m] < 0.0));
    }
    double peak = 0.0;
    for (int m = 0; m < K; ++m) peak = std::max(peak, std::abs(r.c[m] * setup.l[m]));
    CHECK(std::abs(peak - 1.0) < 1e-14);
    CHECK(r.imag_residual < 1e-8);
    double lead = 0.0;
    CHECK(low_mode_leak(r, lead) < 1e-8);
    CHECK(lead > 1e-4);
  }
}

TEST_CASE("compatibility vector is scale invariant in the traces") {
  auto gen = testing_util::rng(22);
  const auto t = random_traces(gen, 4);
  auto t2 = t;
  for (auto& a : t2.arcs) a.amplitude *= 3.7;
  const auto c1 = compatibility_vector(t, 0.6), c2 = compatibility_vector(t2, 0.6);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(c1.c[m] - c2.c[m]) < 1e-12);
}

TEST_CASE("odd species count goes through the double cover") {
  const auto setup = setup_of(cyclic_ratio_matrix({10.0, 10.0, 10.0}));
  const auto t = uniform_traces(3, ArcShape::Bump);
  const auto d = double_cover(setup, t);
  CHECK(d.setup.K == 6);
  CHECK(std::abs(d.setup.alpha - 2.0 * setup.alpha) < 1e-13);
  CHECK(d.traces.nodes[3] == doctest::Approx(kPi));
  const auto s = solve_scaling(setup, t);
  CHECK(s.sheets == 2);
  CHECK(s.fold_mismatch < 1e-10);
  for (double v : s.sbar) CHECK(std::abs(v - 1.0) < 1e-8);
  CHECK_THROWS_AS(double_cover(setup_of(cyclic_ratio_matrix({1, 1, 1, 1})), uniform_traces(4, ArcShape::Bump)),
                  PreconditionFailed);
  CHECK_THROWS_AS(compat_solve(setup, t), PreconditionFailed);
}

TEST_CASE("double cover folds for random odd problems") {
  auto gen = testing_util::rng(23);
  std::uniform_real_distribution<double> r(0.5, 4.0);
  for (int trial = 0; trial < 4; ++trial) {
    const int K = trial % 2 == 0 ? 3 : 5;
    std::vector<double> ratios(K);
    for (double& v : ratios) v = r(gen);
    const auto s = solve_scaling(setup_of(cyclic_ratio_matrix(ratios)), random_traces(gen, K));
    CHECK(s.fold_mismatch < 1e-8);
    for (double v : s.sbar) CHECK(v > 0.0);
  }
}
