#include <cmath>

#include "spiral/errors.hpp"
#include "spiral/specfun.hpp"
#include "test_helpers.hpp"

using namespace spiral;
using testing_util::rel_err;

TEST_CASE("reciprocal gamma matches high-precision values") {
  struct Case {
    cplx w, want;
  };
  const Case cases[] = {
      {{2, -1}, {1.2001760188136033, 0.63056837777692144}},
      {{0.3, 2}, {6.438691743419047, 8.4016688659007194}},
      {{-1.5, 0.5}, {0.9363882290535801, -0.34863660082595869}},
      {{-3.7, -0.2}, {5.1127107815144677, -0.49704039541419233}},
      {{12.5, 3}, {3.8073995131599622e-9, -9.881809310568888e-9}},
  };
  for (const auto& c : cases) CHECK(rel_err(reciprocal_gamma(c.w), c.want) < 1e-13);
}

TEST_CASE("reciprocal gamma vanishes at the poles") {
  for (int m = 0; m <= 6; ++m) CHECK(reciprocal_gamma(double(-m)) == cplx(0.0));
  CHECK(std::abs(reciprocal_gamma(1.0) - 1.0) < 1e-15);
}

TEST_CASE("reciprocal gamma obeys the shift relation") {
  auto gen = testing_util::rng(1);
  std::uniform_real_distribution<double> re(-6.0, 8.0), im(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const cplx w(re(gen), im(gen));
    CHECK(std::abs(reciprocal_gamma(w + 1.0) * w - reciprocal_gamma(w)) <=
          1e-12 * (std::abs(reciprocal_gamma(w)) + 1e-300));
  }
}

TEST_CASE("theta matches high-precision values") {
  struct Case {
    cplx nu, z, value, derivative;
  };
  const Case cases[] = {
      {{2, -0.5}, {3, 2}, {0.51624479457231149, 0.39812488018237842}, {0.036651400903110796, 0.035616579465917072}},
      {{1, -1}, {-50, 20}, {-0.0046087530432199326, 0.014101723794245815}, {0.0013176202454741447, -0.0061511129458076415}},
      {{-2.5, 0.3}, {7, -4}, {0.67805694082146945, -2.4198905140834783}, {0.44419173797348513, -0.8081532400439168}},
  };
  for (const auto& c : cases) {
    const ThetaValue t = theta_with_derivative(c.nu, c.z);
    CHECK(rel_err(t.value, c.value) < 1e-12);
    CHECK(rel_err(t.derivative, c.derivative) < 1e-11);
    CHECK(rel_err(theta(c.nu, c.z), c.value) < 1e-12);
    CHECK(rel_err(theta_derivative(c.nu, c.z), c.derivative) < 1e-11);
  }
}

TEST_CASE("theta reduces to modified Bessel values at integer order") {
  // I_0(2) = Θ_0(4), I_1(2)/4 = Θ'_0(4)
  CHECK(std::abs(theta(0.0, 4.0) - 2.27958530233607) < 1e-13);
  CHECK(std::abs(theta_derivative(0.0, 4.0) / 0.39765921365933227 - 1.0) < 1e-12);
}

TEST_CASE("theta at the origin is the reciprocal gamma") {
  auto gen = testing_util::rng(2);
  std::uniform_real_distribution<double> re(-3.0, 5.0), im(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const cplx nu(re(gen), im(gen));
    CHECK(std::abs(theta(nu, 0.0) - reciprocal_gamma(1.0 + nu)) < 1e-14);
  }
}

TEST_CASE("theta satisfies the order recurrence") {
  // Θ_{ν−1} − (z/4)Θ_{ν+1} = νΘ_ν
  auto gen = testing_util::rng(3);
  std::uniform_real_distribution<double> nre(-2.0, 4.0), nim(-2.0, 2.0), zre(-60.0, 40.0), zim(-30.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const cplx nu(nre(gen), nim(gen)), z(zre(gen), zim(gen));
    const cplx lhs = theta(nu - 1.0, z) - z / 4.0 * theta(nu + 1.0, z);
    const cplx rhs = nu * theta(nu, z);
    const double scale = std::abs(theta(nu - 1.0, z)) + std::abs(z / 4.0 * theta(nu + 1.0, z));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
  }
}

TEST_CASE("theta derivative agrees with a central difference") {
  auto gen = testing_util::rng(4);
  std::uniform_real_distribution<double> re(-20.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const cplx nu(1.0 + 0.1 * re(gen), 0.1 * re(gen)), z(re(gen), re(gen));
    const double h = 1e-5;
    const cplx fd = (theta(nu, z + h) - theta(nu, z - h)) / (2.0 * h);
    CHECK(std::abs(fd - theta_derivative(nu, z)) <= 1e-7 * (std::abs(theta_derivative(nu, z)) + 1e-8));
  }
}

TEST_CASE("large-argument expansion agrees with high-precision values") {
  CHECK(rel_err(theta({1, -0.5}, {-2000, -300}), {-0.15324790122232928, 0.032581980911191736}) < 1e-12);
  CHECK(rel_err(theta({1, -0.5}, {-500, 10}), {0.0097628022007159743, 0.003726957161881037}) < 1e-12);
  CHECK(rel_err(theta({2, 0}, {300, 400}), {-259507.21769129948, 157278.40737165019}) < 1e-12);
  CHECK(rel_err(theta({1, -1}, {-400, 0.001}), {-0.037124162452322565, -0.013098806167235816}) < 1e-12);
  CHECK(rel_err(theta({1, -1}, {-400, -0.001}), {-0.037126063584186114, -0.013099466960311704}) < 1e-12);
}

TEST_CASE("series and large-argument branches join continuously") {
  for (double phase : {0.0, 1.0, 2.0, 3.0, -2.5}) {
    const cplx a = std::polar(224.999, phase), b = std::polar(225.001, phase);
    CHECK(rel_err(theta({1, -1}, a), theta({1, -1}, b)) < 1e-4);
  }
}

TEST_CASE("normalized theta is one at the origin and rejects negative integer shifts") {
  const ThetaValue t = theta_normalized({40.0, -3.0}, 0.0);
  CHECK(std::abs(t.value - 1.0) < 1e-15);
  CHECK(std::abs(t.derivative - 1.0 / (4.0 * cplx(41.0, -3.0))) < 1e-15);
  CHECK_THROWS_AS(theta_normalized(-1.0, 2.0), InvalidOrder);
  CHECK_THROWS_AS(theta_normalized(-3.0, 2.0), InvalidOrder);
}

TEST_CASE("series reports non-convergence when capped") {
  SeriesConfig cfg;
  cfg.max_terms = 3;
  CHECK_THROWS_AS(theta(1.0, cplx(100.0, 10.0), cfg), NonConvergence);
}

TEST_CASE("coefficients follow the ratio recurrence") {
  const cplx nu(1.5, -0.5), z(3.0, 1.0);
  const auto c = theta_coefficients(nu, z, 30);
  cplx sum = 0.0;
  for (const cplx& v : c) sum += v;
  CHECK(rel_err(sum, theta(nu, z)) < 1e-13);
  CHECK(rel_err(c[0], reciprocal_gamma(1.0 + nu)) < 1e-15);
}

TEST_CASE("first Bessel zeros by bisection") {
  const std::pair<double, double> cases[] = {{0.0, 2.4048255576957728}, {0.5, kPi},
                                             {1.0, 3.8317059702075123}, {2.0, 5.1356223018406826},
                                             {2.5, 5.7634591968945498}, {7.3, 11.429093752762},
                                             {20.0, 25.417140814072524}};
  for (const auto& [tau, want] : cases) CHECK(std::abs(bessel_j_first_zero(tau) - want) < 1e-9 * want);
  CHECK(std::abs(kJ01 - bessel_j_first_zero(0.0)) < 1e-12);
  CHECK_THROWS_AS(bessel_j_first_zero(-1.0), InvalidOrder);
}

TEST_CASE("first zero grows with the order") {
  double prev = bessel_j_first_zero(0.0);
  for (double tau = 0.25; tau <= 6.0; tau += 0.25) {
    const double j = bessel_j_first_zero(tau);
    CHECK(j > prev);
    CHECK(j >= kJ01 + tau - 1e-12);
    prev = j;
  }
}

TEST_CASE("theta zeros on the negative axis are squared Bessel zeros") {
  const ZeroReport rep = theta_zeros(1.0, Rect{-110.0, -1.0, -1.0, 1.0});
  REQUIRE(rep.zeros.size() == 3);
  const double want[] = {14.6819706421239, 49.2184563216946, 103.499453895137};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(rep.zeros[i].real() + want[i]) < 1e-9 * want[i]);
    CHECK(std::abs(rep.zeros[i].imag()) < 1e-9);
  }
}

TEST_CASE("theta zeros of the complex order in the upper half plane") {
  const ZeroReport rep = theta_zeros({1.0, -1.0}, Rect{-140.0, 40.0, 0.0, 40.0});
  REQUIRE(rep.zeros.size() == 3);
  const cplx want[] = {{-13.2954628787, 10.3607565091}, {-47.7769217899, 20.2213045655},
                       {-102.044144209, 30.0849878856}};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(rep.zeros[i] - want[i]) < 1e-8);
  CHECK(rep.dropped.empty());
}

TEST_CASE("zero finder recovers random polynomial roots") {
  auto gen = testing_util::rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> roots;
    for (int i = 0; i < 4; ++i) roots.emplace_back(u(gen), u(gen));
    const auto f = [&](cplx z) {
      cplx p = 1.0, dp = 0.0;
      for (const cplx& r : roots) {
        dp = dp * (z - r) + p;
        p *= z - r;
      }
      return ThetaValue{p, dp};
    };
    const ZeroReport rep = find_analytic_zeros(f, Rect{-5.0, 5.0, -5.0, 5.0}, {0.25});
    CHECK(rep.zeros.size() == roots.size());
    for (const cplx& r : roots) {
      double best = 1e9;
      for (const cplx& z : rep.zeros) best = std::min(best, std::abs(z - r));
      CHECK(best < 1e-9);
    }
  }
}

TEST_CASE("serial and parallel zero searches agree") {
  ZeroSearchOptions serial;
  serial.parallel = false;
  const auto a = theta_zeros({2.0, -0.5}, Rect{-80.0, 10.0, -20.0, 20.0}, serial);
  const auto b = theta_zeros({2.0, -0.5}, Rect{-80.0, 10.0, -20.0, 20.0});
  REQUIRE(a.zeros.size() == b.zeros.size());
  for (std::size_t i = 0; i < a.zeros.size(); ++i) CHECK(a.zeros[i] == b.zeros[i]);
}
