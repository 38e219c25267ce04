#include "spiral/oracle.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "spiral/errors.hpp"

namespace spiral {

namespace {

// Tridiagonal solve with constant off-diagonal −1/h², Thomas algorithm.
void tridiag_solve(const std::vector<double>& diag, double off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double denom = diag[0];
  c[0] = off / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - off * c[i - 1];
    c[i] = off / denom;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

double pencil_eigen(double a, double b, const EigenDiscretization& disc) {
  if (!(a > 0.0)) throw PreconditionFailed("weighted eigenproblem needs a > 0");
  if (disc.M < 1000) throw PreconditionFailed("weighted eigenproblem needs M >= 1000");
  if (disc.Y < 20.0) throw PreconditionFailed("weighted eigenproblem needs Y >= 20");
  const int M = disc.M;
  const double h = disc.Y / (M + 1);
  const double off = -1.0 / (h * h);
  std::vector<double> diag(M, 2.0 / (h * h) + a * a), w(M), u(M);
  for (int i = 0; i < M; ++i) {
    const double y = b + (i + 1) * h;
    w[i] = std::exp(-2.0 * y);
    u[i] = std::sin(kPi * (i + 1) / (M + 1)) * std::exp(-a * (i + 1) * h);
  }
  const auto rayleigh = [&](const std::vector<double>& v) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < M; ++i) {
      double Av = diag[i] * v[i];
      if (i > 0) Av += off * v[i - 1];
      if (i + 1 < M) Av += off * v[i + 1];
      num += v[i] * Av;
      den += v[i] * w[i] * v[i];
    }
    return num / den;
  };
  double lambda = rayleigh(u);
  for (int it = 0; it < disc.max_iter; ++it) {
    std::vector<double> rhs(M);
    for (int i = 0; i < M; ++i) rhs[i] = w[i] * u[i];
    tridiag_solve(diag, off, rhs);
    double norm = 0.0;
    for (double v : rhs) norm = std::max(norm, std::abs(v));
    for (int i = 0; i < M; ++i) u[i] = rhs[i] / norm;
    const double next = rayleigh(u);
    if (std::abs(next - lambda) <= disc.tol * std::abs(next)) return next;
    lambda = next;
  }
  throw NonConvergence("inverse iteration on the weighted pencil did not settle");
}

struct Rule {
  std::vector<double> x, w;
};

Rule arc_rule(const ArcTrace& arc, const BruteForceOptions& opts) {
  std::vector<double> cuts{arc.x0};
  for (double k : arc.kinks()) cuts.push_back(k);
  cuts.push_back(arc.x1);
  // Boost's 20-point Gauss-Legendre table, mirrored and rescaled per panel
  using G = boost::math::quadrature::gauss<double, 20>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  std::vector<double> ref_x, ref_w;
  for (std::size_t i = 0; i < ab.size(); ++i) {
    ref_x.push_back(ab[i]);
    ref_w.push_back(wt[i]);
    if (ab[i] != 0.0) {
      ref_x.push_back(-ab[i]);
      ref_w.push_back(wt[i]);
    }
  }
  Rule r;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const int panels = std::max(1, opts.panels / int(cuts.size() - 1));
    const double len = (cuts[s + 1] - cuts[s]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = cuts[s] + (p + 0.5) * len;
      for (std::size_t i = 0; i < ref_x.size(); ++i) {
        r.x.push_back(mid + 0.5 * len * ref_x[i]);
        r.w.push_back(0.5 * len * ref_w[i]);
      }
    }
  }
  return r;
}

}  // namespace

double halfline_weighted_eigen(double a, const EigenDiscretization& disc) { return pencil_eigen(a, 0.0, disc); }

double strip_weighted_eigen(double a, double b, const EigenDiscretization& disc) {
  if (!(a > 0.0)) throw PreconditionFailed("strip width must be positive");
  return pencil_eigen(kPi / a, b, disc);
}

std::vector<double> brute_force_compat(const BoundaryTraces& t, double alpha, const BruteForceOptions& opts) {
  t.validate();
  const int K = t.K();
  if (K % 2 != 0 || K > 4) throw PreconditionFailed("brute_force_compat handles 2 or 4 arcs");
  const int n = K / 2;
  const int dim = 2 * n - 1;
  std::vector<Rule> rules;
  for (const auto& arc : t.arcs) rules.push_back(arc_rule(arc, opts));

  // det of the minor without row k = n and column l equals the integral over
  // the remaining arcs of Π e^{−α t_j}φ_{m_j}(t_j)·det[e^{−i k t_j}] / (2π)^dim
  std::vector<cplx> cof(K);
  for (int l = 0; l < K; ++l) {
    std::vector<int> cols;
    for (int m = 0; m < K; ++m)
      if (m != l) cols.push_back(m);
    std::vector<std::size_t> idx(dim, 0);
    cplx total = 0.0;
    while (true) {
      double weight = 1.0;
      Eigen::MatrixXcd E(dim, dim);
      for (int j = 0; j < dim; ++j) {
        const Rule& r = rules[cols[j]];
        const double x = r.x[idx[j]];
        weight *= r.w[idx[j]] * std::exp(-alpha * x) * t.arcs[cols[j]](x);
        for (int row = 0; row < dim; ++row) E(row, j) = std::polar(1.0, -double(row - n + 1) * x);
      }
      if (weight != 0.0) total += weight * (dim == 1 ? E(0, 0) : E.determinant());
      int j = 0;
      while (j < dim && ++idx[j] == rules[cols[j]].x.size()) idx[j++] = 0;
      if (j == dim) break;
    }
    cof[l] = ((l + 2 * n) % 2 == 0 ? 1.0 : -1.0) * total / std::pow(kTwoPi, dim);
  }
  cplx sq = 0.0;
  for (const cplx& c : cof) sq += c * c;
  const cplx rot = std::polar(1.0, -0.5 * std::arg(sq));
  std::vector<double> c(K);
  double scale = 0.0;
  for (int l = 0; l < K; ++l) {
    c[l] = (cof[l] * rot).real();
    scale = std::max(scale, std::abs(c[l]));
  }
  const double sgn = c[0] > 0 ? 1.0 : -1.0;
  for (double& v : c) v *= sgn / scale;
  return c;
}

}  // namespace spiral
