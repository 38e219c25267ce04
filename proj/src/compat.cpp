#include "spiral/compat.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <optional>

#include "spiral/errors.hpp"

namespace spiral {

namespace {

cplx integrate_segment(const std::function<cplx(double)>& f, double a, double b, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 25, rel_tol);
}

struct CompatCore {
  Eigen::MatrixXcd A;
  Eigen::VectorXd c;
  cplx det;
  double imag_residual = 0.0;
};

CompatCore solve_core(const BoundaryTraces& t, double alpha, kernels::Exec exec) {
  t.validate();
  const int K = t.K();
  if (K % 2 != 0) throw PreconditionFailed("compat_solve needs an even number of arcs; apply double_cover first");
  CompatCore core;
  core.A = fourier_matrix(t, alpha, exec);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(core.A);
  core.det = lu.determinant();
  // Hadamard ratio after column equilibration: the e^{−αx} weight alone
  // shrinks later columns by orders of magnitude without making A singular
  Eigen::MatrixXcd B = core.A;
  double col_scale = 1.0;
  for (int m = 0; m < K; ++m) {
    const double c = B.col(m).norm();
    if (c > 0.0) B.col(m) /= c;
    col_scale *= c;
  }
  double row_norms = 1.0;
  for (int i = 0; i < K; ++i) row_norms *= B.row(i).norm();
  if (!(col_scale > 0.0 && std::abs(core.det) / col_scale >= 1e-12 * row_norms))
    throw SingularSystem("compatibility matrix is singular: |det A| = " + std::to_string(std::abs(core.det)));
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(K);
  rhs(K - 1) = 1.0;
  Eigen::VectorXcd c = lu.solve(rhs);
  // rotate onto the real line: the phase making Σc² real and positive
  const cplx s = c.array().square().sum();
  c *= std::polar(1.0, -0.5 * std::arg(s));
  core.imag_residual = c.imag().norm() / c.norm();
  if (core.imag_residual > 1e-8)
    throw PreconditionFailed("compatibility solution is not real (residual " +
                             std::to_string(core.imag_residual) + ")");
  core.c = c.real();
  if (core.c(0) < 0) core.c = -core.c;
  for (int m = 0; m < K; ++m)
    if (!((m % 2 == 0 ? 1.0 : -1.0) * core.c(m) > 0.0))
      throw PreconditionFailed("compatibility solution is not sign-alternating");
  return core;
}

}  // namespace

CompetitionSetup setup_of(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidMatrix("competition matrix must be square");
  const int K = int(a.rows());
  if (K < 2) throw InvalidMatrix("competition matrix needs K >= 2");
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      if (i != j && !(a(i, j) > 0.0 && std::isfinite(a(i, j))))
        throw InvalidMatrix("off-diagonal entry a(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            ") must be positive and finite");
  CompetitionSetup s;
  s.K = K;
  s.a = a;
  double logsum = 0.0;
  for (int i = 0; i < K; ++i) logsum += std::log(a(i, (i + 1) % K) / a((i + 1) % K, i));
  s.alpha = logsum / kTwoPi;
  s.l.assign(K, 1.0);
  for (int i = 1; i < K; ++i) s.l[i] = a(i, i - 1) / a(i - 1, i) * s.l[i - 1];
  double prod = 1.0;
  for (int i = 0; i < K; ++i) {
    const int prev = (i + K - 1) % K;
    prod *= a(prev, i) / a(i, prev);
  }
  s.sigma = (K % 2 == 0 ? 1.0 : -1.0) * prod;
  return s;
}

Eigen::MatrixXd cyclic_ratio_matrix(const std::vector<double>& ratios) {
  const int K = int(ratios.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(K, K);
  a.diagonal().setZero();
  for (int i = 0; i < K; ++i) a(i, (i + 1) % K) = ratios[i];
  return a;
}

double ArcTrace::operator()(double x) const {
  const double w = x1 - x0;
  const double s = (x - x0) / w;
  if (!(s > 0.0 && s < 1.0)) return 0.0;
  switch (shape) {
    case ArcShape::Bump: {
      const double u = 2.0 * s - 1.0;
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
    case ArcShape::Sine:
      return amplitude * std::sin(kPi * s);
    case ArcShape::PiecewiseLinear: {
      const double pos = s * double(samples.size() - 1);
      const auto j = std::min(std::size_t(pos), samples.size() - 2);
      const double f = pos - double(j);
      return amplitude * ((1.0 - f) * samples[j] + f * samples[j + 1]);
    }
  }
  return 0.0;
}

std::vector<double> ArcTrace::kinks() const {
  std::vector<double> k;
  if (shape == ArcShape::PiecewiseLinear)
    for (std::size_t j = 1; j + 1 < samples.size(); ++j)
      k.push_back(x0 + (x1 - x0) * double(j) / double(samples.size() - 1));
  return k;
}

std::vector<double> BoundaryTraces::breakpoints() const {
  std::vector<double> b = nodes;
  for (const ArcTrace& a : arcs)
    for (double x : a.kinks()) b.push_back(x);
  std::sort(b.begin(), b.end());
  return b;
}

void BoundaryTraces::validate() const {
  const int K = int(arcs.size());
  if (K < 2) throw InvalidTraces("need at least two arcs");
  if (int(nodes.size()) != K + 1) throw InvalidTraces("need K+1 nodes for K arcs");
  if (std::abs(nodes.front()) > 1e-12) throw InvalidTraces("first node must be 0");
  if (std::abs(nodes.back() - kTwoPi) > 1e-9) throw InvalidTraces("last node must be 2*pi");
  for (int m = 0; m < K; ++m) {
    if (!(nodes[m + 1] > nodes[m])) throw InvalidTraces("nodes must be strictly increasing (arcs overlap)");
    const ArcTrace& a = arcs[m];
    if (a.x0 != nodes[m] || a.x1 != nodes[m + 1]) throw InvalidTraces("arc support does not match its nodes");
    if (!(a.amplitude > 0.0 && std::isfinite(a.amplitude))) throw InvalidTraces("arc amplitude must be positive");
    if (a.shape == ArcShape::PiecewiseLinear) {
      if (a.samples.size() < 3) throw InvalidTraces("piecewise-linear arc needs at least three samples");
      if (a.samples.front() != 0.0 || a.samples.back() != 0.0)
        throw InvalidTraces("piecewise-linear arc must vanish at its endpoints");
      double peak = 0.0;
      for (double v : a.samples) {
        if (!(v >= 0.0 && std::isfinite(v))) throw InvalidTraces("trace samples must be non-negative");
        peak = std::max(peak, v);
      }
      if (peak == 0.0) throw InvalidTraces("trace samples are identically zero");
    }
  }
}

double BoundaryTraces::eval(double x) const {
  double s = 0.0;
  for (const auto& a : arcs) s += a(x);
  return s;
}

BoundaryTraces make_traces(const std::vector<double>& nodes, const std::vector<ArcTrace>& shapes) {
  if (nodes.size() != shapes.size() + 1) throw InvalidTraces("need K+1 nodes for K arcs");
  BoundaryTraces t;
  t.nodes = nodes;
  t.arcs = shapes;
  for (std::size_t m = 0; m < shapes.size(); ++m) {
    t.arcs[m].x0 = nodes[m];
    t.arcs[m].x1 = nodes[m + 1];
  }
  t.validate();
  return t;
}

BoundaryTraces uniform_traces(int K, ArcShape shape, double amplitude) {
  std::vector<double> nodes(K + 1);
  for (int m = 0; m <= K; ++m) nodes[m] = kTwoPi * m / K;
  nodes[K] = kTwoPi;
  ArcTrace a;
  a.shape = shape;
  a.amplitude = amplitude;
  if (shape == ArcShape::PiecewiseLinear) a.samples = {0.0, 1.0, 0.0};
  return make_traces(nodes, std::vector<ArcTrace>(K, a));
}

cplx fourier_coefficient(const std::function<double(double)>& Phi, double alpha, double k,
                         const std::vector<double>& breakpoints, double rel_tol) {
  std::vector<double> cuts{0.0, kTwoPi};
  for (double b : breakpoints)
    if (b > 0.0 && b < kTwoPi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const cplx rate(alpha, k);
  const auto f = [&](double x) { return std::exp(-rate * x) * Phi(x); };
  cplx sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate_segment(f, cuts[i], cuts[i + 1], rel_tol);
  return sum / kTwoPi;
}

namespace {

// ∫_a^b e^{−rx}(g0 + s(x − a))dx
cplx linear_piece(cplx r, double a, double b, double g0, double slope) {
  const double L = b - a;
  if (std::abs(r) * L < 1e-6) {
    // short Taylor form; the exact one cancels badly here
    const cplx ea = std::exp(-r * a);
    return ea * (g0 * L * (1.0 - r * L / 2.0 + r * r * L * L / 6.0) +
                 slope * L * L * (0.5 - r * L / 3.0 + r * r * L * L / 8.0));
  }
  const cplx ea = std::exp(-r * a), eb = std::exp(-r * b);
  const cplx i0 = (ea - eb) / r;
  const cplx i1 = -L * eb / r + (ea - eb) / (r * r);
  return g0 * i0 + slope * i1;
}

// closed forms for the sine and piecewise-linear shapes; nullopt falls back to quadrature
std::optional<cplx> arc_closed_form(const ArcTrace& arc, cplx r) {
  const double L = arc.x1 - arc.x0;
  if (arc.shape == ArcShape::Sine) {
    // ∫_0^L e^{−ru} sin(πu/L)du = w(1 + e^{−rL})/(r² + w²), w = π/L
    const double w = kPi / L;
    const cplx den = r * r + w * w;
    if (std::abs(den) < 1e-8 * w * w) return std::nullopt;
    return arc.amplitude * std::exp(-r * arc.x0) * w * (1.0 + std::exp(-r * L)) / den;
  }
  if (arc.shape == ArcShape::PiecewiseLinear) {
    const std::size_t m = arc.samples.size() - 1;
    const double h = L / double(m);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double a = arc.x0 + h * double(j);
      sum += linear_piece(r, a, a + h, arc.samples[j], (arc.samples[j + 1] - arc.samples[j]) / h);
    }
    return arc.amplitude * sum;
  }
  return std::nullopt;
}

}  // namespace

cplx arc_coefficient(const ArcTrace& arc, double alpha, double k, double rel_tol) {
  if (const auto exact = arc_closed_form(arc, cplx(alpha, k))) return *exact / kTwoPi;
  std::vector<double> cuts{arc.x0};
  for (double x : arc.kinks()) cuts.push_back(x);
  cuts.push_back(arc.x1);
  const cplx rate(alpha, k);
  const auto f = [&](double x) { return std::exp(-rate * x) * arc(x); };
  cplx sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate_segment(f, cuts[i], cuts[i + 1], rel_tol);
  return sum / kTwoPi;
}

Eigen::MatrixXcd fourier_matrix(const BoundaryTraces& t, double alpha, kernels::Exec exec) {
  const int K = t.K();
  const int n = K / 2;
  Eigen::MatrixXcd A(K, K);
  kernels::for_each_index(
      std::ptrdiff_t(K) * K,
      [&](std::ptrdiff_t idx) {
        const int row = int(idx / K), m = int(idx % K);
        A(row, m) = arc_coefficient(t.arcs[m], alpha, double(row - n + 1));
      },
      exec);
  return A;
}

double CompatResult::Phi(double x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) s += c[m] * traces.arcs[m](x);
  return s;
}

CompatVector compatibility_vector(const BoundaryTraces& t, double alpha, kernels::Exec exec) {
  CompatCore core = solve_core(t, alpha, exec);
  CompatVector out;
  const double scale = core.c.cwiseAbs().maxCoeff();
  out.c.assign(core.c.data(), core.c.data() + core.c.size());
  for (double& v : out.c) v /= scale;
  out.det_A = core.det;
  out.imag_residual = core.imag_residual;
  return out;
}

CompatResult compat_solve(const CompetitionSetup& setup, const BoundaryTraces& t) {
  if (t.K() != setup.K) throw InvalidTraces("number of arcs differs from K");
  CompatCore core = solve_core(t, setup.alpha, kernels::Exec::Parallel);
  const int K = setup.K;
  double scale = 0.0;
  for (int m = 0; m < K; ++m) scale = std::max(scale, std::abs(core.c(m) * setup.l[m]));
  CompatResult r;
  r.n = K / 2;
  r.alpha = setup.alpha;
  r.traces = t;
  r.det_A = core.det;
  r.imag_residual = core.imag_residual;
  r.c.resize(K);
  r.sbar.resize(K);
  r.phi_n = 0.0;
  for (int m = 0; m < K; ++m) {
    r.c[m] = core.c(m) / scale;
    r.sbar[m] = (m % 2 == 0 ? 1.0 : -1.0) * r.c[m] * setup.l[m];
    r.phi_n += r.c[m] * core.A(K - 1, m);
  }
  return r;
}

DoubledProblem double_cover(const CompetitionSetup& setup, const BoundaryTraces& t) {
  const int K = setup.K;
  if (K % 2 == 0) throw PreconditionFailed("double_cover is for odd K");
  if (t.K() != K) throw InvalidTraces("number of arcs differs from K");
  const int K2 = 2 * K;
  Eigen::MatrixXd a2(K2, K2);
  for (int i = 0; i < K2; ++i)
    for (int j = 0; j < K2; ++j) {
      if (i == j)
        a2(i, j) = 0.0;
      else if (i % K == j % K)
        a2(i, j) = 1.0;  // copies of one species never touch
      else
        a2(i, j) = setup.a(i % K, j % K);
    }
  DoubledProblem d;
  d.setup = setup_of(a2);
  std::vector<double> nodes(K2 + 1);
  for (int m = 0; m <= K; ++m) nodes[m] = 0.5 * t.nodes[m];
  for (int m = 1; m <= K; ++m) nodes[K + m] = kPi + 0.5 * t.nodes[m];
  nodes[K2] = kTwoPi;
  std::vector<ArcTrace> arcs(K2);
  for (int m = 0; m < K2; ++m) arcs[m] = t.arcs[m % K];
  d.traces = make_traces(nodes, arcs);
  return d;
}

ScalingSolution solve_scaling(const CompetitionSetup& setup, const BoundaryTraces& t) {
  t.validate();
  ScalingSolution s;
  if (setup.K % 2 == 0) {
    s.compat = compat_solve(setup, t);
    s.sbar = s.compat.sbar;
    return s;
  }
  const DoubledProblem d = double_cover(setup, t);
  s.compat = compat_solve(d.setup, d.traces);
  s.sheets = 2;
  const int K = setup.K;
  s.sbar.assign(s.compat.sbar.begin(), s.compat.sbar.begin() + K);
  const double peak = *std::max_element(s.sbar.begin(), s.sbar.end());
  for (double& v : s.sbar) v /= peak;
  for (int m = 0; m < K; ++m)
    s.fold_mismatch = std::max(s.fold_mismatch, std::abs(s.compat.sbar[m + K] - s.compat.sbar[m]));
  return s;
}

}  // namespace spiral
