#include <algorithm>
#include <cmath>
#include <random>

#include "spiral/cli.hpp"
#include "spiral/errors.hpp"
#include "spiral/modes.hpp"
#include "spiral/special.hpp"

namespace spiral::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json vec_json(const std::vector<double>& v) { return json(v); }

struct Pipeline {
  CompetitionSetup setup;
  ScalingSolution scaling;
  HalfPlaneSolution sol;
};

Pipeline run_pipeline(const ProblemConfig& cfg) {
  Pipeline p{setup_of(cfg.a), {}, {}};
  p.scaling = solve_scaling(p.setup, cfg.traces);
  p.sol = HalfPlaneSolution::assemble(p.scaling.compat, p.scaling.sheets, cfg.mu, cfg.omega, cfg.assemble);
  return p;
}

json setup_json(const Pipeline& p) {
  json j;
  j["K"] = p.setup.K;
  j["alpha"] = p.setup.alpha;
  j["l"] = vec_json(p.setup.l);
  j["sigma"] = p.setup.sigma;
  j["sbar"] = vec_json(p.scaling.sbar);
  j["sheets"] = p.scaling.sheets;
  j["c"] = vec_json(p.scaling.compat.c);
  j["det_A"] = complex_json(p.scaling.compat.det_A);
  j["imag_residual"] = p.scaling.compat.imag_residual;
  j["fold_mismatch"] = p.scaling.fold_mismatch;
  j["n"] = p.scaling.compat.n;
  j["phi_n"] = complex_json(p.scaling.compat.phi_n);
  return j;
}

json base_manifest(const std::string& command) {
  json m;
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  return m;
}

// Fourier coefficients of e^{−αx}Φ below the first active index, relative to
// Σ|φ_k| over the stored range
double low_mode_leak(const CompatResult& compat) {
  double total = 0.0, worst = 0.0;
  const std::vector<double> cuts = compat.traces.breakpoints();
  const auto Phi = [&](double x) { return compat.Phi(x); };
  for (int k = 0; k <= compat.n + 4; ++k) {
    const double a = std::abs(fourier_coefficient(Phi, compat.alpha, double(k), cuts, 1e-12));
    total += a;
    if (k < compat.n) worst = std::max(worst, a);
  }
  return worst / total;
}

kernels::Grid<double> halfplane_grid(const ProblemConfig& cfg, const HalfPlaneSolution& sol) {
  const double period = kTwoPi * sol.sheets();
  std::vector<double> xs(cfg.grid.nx);
  for (int i = 0; i < cfg.grid.nx; ++i) xs[i] = period * i / cfg.grid.nx;
  return sample_v(sol, xs, kernels::linspace(cfg.grid.y_lo, cfg.grid.y_hi, std::size_t(cfg.grid.ny)));
}

std::vector<std::vector<double>> grid_rows(const kernels::Grid<double>& g) {
  std::vector<std::vector<double>> rows;
  rows.reserve(g.values.size());
  for (std::size_t j = 0; j < g.ys.size(); ++j)
    for (std::size_t i = 0; i < g.xs.size(); ++i) rows.push_back({g.xs[i], g.ys[j], g.at(i, j)});
  return rows;
}

json fit_json(const SpiralFit& f) {
  json j;
  j["gamma_fit"] = f.gamma_fit;
  j["gamma_expected"] = f.gamma_expected;
  j["gamma_residual"] = f.gamma_residual;
  j["alpha_fit"] = f.alpha_fit;
  j["alpha_residual"] = f.alpha_residual;
  j["amplitude_band"] = {f.amplitude_lo, f.amplitude_hi};
  j["r_range"] = {f.r_lo, f.r_hi};
  j["max_arm_gap_error"] = f.max_arm_gap_error;
  return j;
}

void add_check(std::vector<VerifyCheck>& out, std::string name, bool passed, double value, double threshold,
               std::string detail = "") {
  out.push_back({std::move(name), passed, value, threshold, std::move(detail)});
}

}  // namespace

json cmd_sbar(const ProblemConfig& cfg) {
  const CompetitionSetup setup = setup_of(cfg.a);
  Pipeline p{setup, solve_scaling(setup, cfg.traces), {}};
  json m = base_manifest("sbar");
  m["input_hash"] = cfg.hash;
  m["setup"] = setup_json(p);
  write_json(fs::path(cfg.outdir) / "manifest.json", m);
  return m;
}

json cmd_solve(const ProblemConfig& cfg) {
  const fs::path out(cfg.outdir);
  fs::create_directories(out);
  Pipeline p = run_pipeline(cfg);
  const HalfPlaneSolution& sol = p.sol;

  json m = base_manifest("solve");
  m["input_hash"] = cfg.hash;
  m["setup"] = setup_json(p);
  m["mu"] = cfg.mu;
  m["omega"] = cfg.omega;
  m["truncation"] = sol.truncation();
  m["first_index"] = sol.first_index();
  m["leading_frequency"] = sol.leading_frequency();
  m["period_factor"] = sol.period_factor();
  m["coercivity"] = to_string(coercivity_certificate(
      {sol.first_index(), sol.alpha(), cfg.mu, cfg.omega, sol.sheets()}));
  std::vector<std::string> files;

  const auto g = halfplane_grid(cfg, sol);
  write_csv(out / "v_halfplane.csv", {"x", "y", "value"}, grid_rows(g));
  files.push_back("v_halfplane.csv");

  const double y0 = std::max(cfg.grid.y_lo, 0.3);
  const auto r1 = pde_residual(sol, 0.0, 1.0, y0, y0 + 1.0, 1e-2);
  const auto r2 = pde_residual(sol, 0.0, 1.0, y0, y0 + 1.0, 5e-3);
  m["residual"] = {{"h", {1e-2, 5e-3}},
                   {"relative", {r1.relative(), r2.relative()}},
                   {"order", std::log2(r1.relative() / r2.relative())}};

  DiskDensities d(p.setup, sol, cfg.disk);
  std::vector<std::vector<double>> curve_rows;
  json curves = json::array();
  for (std::size_t c = 0; c < d.curves().size(); ++c) {
    const NodalCurve& nc = d.curves()[c];
    curves.push_back({{"index", nc.index}, {"slope", nc.slope}, {"beta", nc.beta}, {"fit_residual", nc.fit_residual}});
    for (const auto& pt : nc.points) {
      const auto xy = to_disk(pt[0], pt[1]);
      curve_rows.push_back({double(c), pt[0], pt[1], xy[0], xy[1]});
    }
  }
  m["curves"] = curves;
  m["slope_expected"] = -sol.alpha() / sol.leading_frequency();
  write_csv(out / "nodal_curves.csv", {"curve", "x", "y", "X", "Y"}, curve_rows);
  files.push_back("nodal_curves.csv");

  // densities on a polar grid, log-spaced in r so the core is resolved
  const int nr = cfg.grid.nr, nt = cfg.grid.ntheta, K = p.setup.K;
  std::vector<std::vector<double>> dens(std::size_t(nr) * nt);
  kernels::for_each_index(nr, [&](std::ptrdiff_t i) {
    const double r = cfg.grid.r_min * std::pow(cfg.grid.r_max / cfg.grid.r_min, double(i) / (nr - 1));
    std::vector<double> thetas(nt);
    for (int j = 0; j < nt; ++j) thetas[j] = kTwoPi * j / nt;
    const auto us = d.ring(r, thetas);
    for (int j = 0; j < nt; ++j) {
      std::vector<double> row{r, thetas[j]};
      row.insert(row.end(), us[j].begin(), us[j].end());
      dens[std::size_t(i) * nt + j] = std::move(row);
    }
  });
  std::vector<std::string> header{"r", "theta"};
  for (int i = 1; i <= K; ++i) header.push_back("u" + std::to_string(i));
  write_csv(out / "densities.csv", header, dens);
  files.push_back("densities.csv");

  if (cfg.fit.enabled) {
    const SpiralFit f = spiral_fit(d, cfg.fit.r_lo, cfg.fit.r_hi, cfg.fit.samples);
    m["spiral_fit"] = fit_json(f);
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < f.radii.size(); ++s) rows.push_back({f.radii[s], f.max_abs_u[s], f.nodal_angle[s]});
    write_csv(out / "spiral_fit.csv", {"r", "max_abs_v", "nodal_angle"}, rows);
    files.push_back("spiral_fit.csv");
  }

  if (cfg.svg) {
    write_svg_contour(out / "v_halfplane.svg", g, "v on the half-plane");
    // rings of points, one profile per ring
    const int rings = 80;
    std::vector<std::vector<double>> Xs(rings), Ys(rings);
    std::vector<std::vector<int>> labels(rings);
    kernels::for_each_index(rings, [&](std::ptrdiff_t i) {
      const double r = (i + 0.5) / rings;
      const int m = std::max(12, int(std::lround(2.0 * kPi * r * rings)));
      std::vector<double> thetas(m);
      for (int j = 0; j < m; ++j) thetas[j] = kTwoPi * j / m;
      const auto us = d.ring(r, thetas);
      for (int j = 0; j < m; ++j) {
        Xs[i].push_back(r * std::cos(thetas[j]));
        Ys[i].push_back(r * std::sin(thetas[j]));
        const auto it = std::max_element(us[j].begin(), us[j].end());
        labels[i].push_back(*it > 0.0 ? int(it - us[j].begin()) : -1);
      }
    });
    std::vector<double> X, Y;
    std::vector<int> label;
    for (int i = 0; i < rings; ++i) {
      X.insert(X.end(), Xs[i].begin(), Xs[i].end());
      Y.insert(Y.end(), Ys[i].begin(), Ys[i].end());
      label.insert(label.end(), labels[i].begin(), labels[i].end());
    }
    write_svg_species(out / "densities.svg", X, Y, label, K, "segregated densities");
    files.push_back("v_halfplane.svg");
    files.push_back("densities.svg");
  }
  std::sort(files.begin(), files.end());
  m["outputs"] = files;
  write_json(out / "manifest.json", m);
  return m;
}

json cmd_resonances(const ResonanceQuery& q) {
  if (q.k < 1) throw PreconditionFailed("resonances: k must be >= 1");
  if (!(q.omega_max > q.omega_min && q.mu_max > q.mu_min)) throw PreconditionFailed("resonances: empty window");
  const double a0 = q.alpha * q.omega_min, a1 = q.alpha * q.omega_max;
  const Rect box{std::min(a0, a1) - q.mu_max, std::max(a0, a1) - q.mu_min, q.k * q.omega_min, q.k * q.omega_max};
  ZeroSearchOptions opts;
  opts.spacing = q.spacing;
  const ZeroReport rep = theta_zeros(cplx(q.k, -q.alpha), box, opts);
  std::vector<std::vector<double>> rows;
  json zeros = json::array();
  for (const cplx& z : rep.zeros) {
    const double omega = z.imag() / q.k, mu = q.alpha * omega - z.real();
    if (omega < q.omega_min || omega > q.omega_max || mu < q.mu_min || mu > q.mu_max) continue;
    rows.push_back({z.real(), z.imag(), omega, mu});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  for (const auto& r : rows) zeros.push_back({{"lambda", {r[0], r[1]}}, {"omega", r[2]}, {"mu", r[3]}});
  json m = base_manifest("resonances");
  m["k"] = q.k;
  m["alpha"] = q.alpha;
  m["window"] = {{"omega", {q.omega_min, q.omega_max}}, {"mu", {q.mu_min, q.mu_max}}};
  m["zeros"] = zeros;
  m["dropped_candidates"] = rep.dropped.size();
  const fs::path out(q.outdir);
  write_csv(out / "resonances.csv", {"re_lambda", "im_lambda", "omega", "mu"}, rows);
  write_json(out / "manifest.json", m);
  return m;
}

json cmd_entire(const EntireQuery& q) {
  const cplx lambda(q.omega * q.alpha - q.mu, q.omega * q.k);
  const SingleModeField f = entire_solution(q.k, q.alpha, lambda);
  const NodalAsymptote a = nodal_asymptote(f);
  const fs::path out(q.outdir);
  const double Y = std::log(q.radius);
  std::vector<double> xs(q.n);
  for (int i = 0; i < q.n; ++i) xs[i] = kTwoPi * i / q.n;
  const auto g = kernels::sample_grid<double>(xs, kernels::linspace(-Y, Y, std::size_t(q.n)),
                                              [&](double x, double y) { return f.eval(x, y); });
  write_csv(out / "field.csv", {"x", "y", "value"}, grid_rows(g));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < a.ys.size(); ++i) {
    const auto xy = to_disk(a.zeta[i], a.ys[i]);
    rows.push_back({a.ys[i], a.zeta[i], xy[0], xy[1]});
  }
  write_csv(out / "nodal.csv", {"y", "x", "X", "Y"}, rows);
  if (q.svg) write_svg_contour(out / "field.svg", g, "entire solution");
  json m = base_manifest("entire");
  m["k"] = q.k;
  m["alpha"] = q.alpha;
  m["omega"] = q.omega;
  m["mu"] = q.mu;
  m["lambda"] = complex_json(lambda);
  m["slope_plus"] = a.slope_plus;
  m["slope_expected"] = a.slope_expected;
  m["exp_coefficient_fit"] = a.exp_coefficient_fit;
  m["exp_coefficient_closed_form"] = a.exp_coefficient_closed_form;
  m["linear"] = a.linear;
  m["linear_deviation"] = a.linear_deviation;
  write_json(out / "manifest.json", m);
  return m;
}

json cmd_caloric(const CaloricQuery& q) {
  const fs::path out(q.outdir);
  const auto xs = kernels::linspace(-q.radius, q.radius, std::size_t(q.n));
  const auto g = kernels::sample_grid<double>(xs, xs, [&](double x, double y) {
    return caloric_eval(q.k, q.omega, std::hypot(x, y), std::atan2(y, x), q.t);
  });
  write_csv(out / "field.csv", {"x", "y", "value"}, grid_rows(g));
  const CaloricPitch p = caloric_pitch(q.k, q.omega, std::min(10.0, 0.2 * q.radius), std::max(q.radius, 50.0));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < p.radii.size(); ++i) rows.push_back({p.radii[i], p.angles[i]});
  write_csv(out / "nodal.csv", {"r", "theta"}, rows);
  if (q.svg) write_svg_contour(out / "field.svg", g, "caloric function");
  json m = base_manifest("caloric");
  m["k"] = q.k;
  m["omega"] = q.omega;
  m["t"] = q.t;
  m["pitch_fit"] = p.slope_fit;
  m["pitch_expected"] = p.expected;
  m["heat_residual"] = caloric_heat_residual(q.k, q.omega, 0.1, 5.0);
  m["sign_changes_half_radius"] = caloric_sign_changes(q.k, q.omega, 0.5 * q.radius, q.t);
  write_json(out / "manifest.json", m);
  return m;
}

std::vector<VerifyCheck> run_verify(const ProblemConfig& cfg) {
  std::vector<VerifyCheck> out;
  Pipeline p = run_pipeline(cfg);
  const HalfPlaneSolution& sol = p.sol;
  const CompatResult& compat = p.scaling.compat;

  const double min_sbar = *std::min_element(p.scaling.sbar.begin(), p.scaling.sbar.end());
  add_check(out, "sbar_positive", min_sbar > 0.0, min_sbar, 0.0);
  add_check(out, "compat_real", compat.imag_residual < 1e-8, compat.imag_residual, 1e-8);
  const double leak = low_mode_leak(compat);
  add_check(out, "low_modes_vanish", leak < 1e-8, leak, 1e-8);
  double total = 0.0;
  for (const cplx& c : sol.coefficients()) total += std::abs(c);
  const double lead = std::abs(sol.coefficients()[sol.first_index() - 1]) / total;
  add_check(out, "leading_mode_present", lead > 1e-4, lead, 1e-4);
  if (p.scaling.sheets == 2)
    add_check(out, "double_cover_fold", p.scaling.fold_mismatch < 1e-8, p.scaling.fold_mismatch, 1e-8);

  double worst_ode = 0.0, worst_norm = 0.0;
  for (int k = sol.first_index(); k <= std::min(sol.truncation(), sol.first_index() + 6); ++k) {
    const Mode& mode = sol.modes()[k - 1];
    worst_ode = std::max(worst_ode, mode_ode_residual(mode, 0.0, 3.0, 1e-3));
    worst_norm = std::max(worst_norm, std::abs(mode.eval(0.0) - 1.0));
  }
  add_check(out, "mode_ode_residual", worst_ode < 1e-4, worst_ode, 1e-4);
  add_check(out, "mode_normalized", worst_norm < 1e-12, worst_norm, 1e-12);

  const auto r1 = pde_residual(sol, 0.0, 1.0, 0.3, 1.3, 1e-2);
  const auto r2 = pde_residual(sol, 0.0, 1.0, 0.3, 1.3, 5e-3);
  add_check(out, "pde_residual", r1.relative() < 1e-3, r1.relative(), 1e-3);
  const double order = std::log2(r1.relative() / r2.relative());
  add_check(out, "pde_residual_order", std::abs(order - 2.0) < 0.3, order, 2.0);

  std::mt19937_64 rng(20240613);
  std::uniform_real_distribution<double> ux(0.0, kTwoPi), uy(0.05, 3.0);
  double worst_period = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double x = ux(rng), y = uy(rng);
    const double a = sol.eval(x + kTwoPi, y), b = sol.period_factor() * sol.eval(x, y);
    worst_period = std::max(worst_period, std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300));
  }
  add_check(out, "period_factor", worst_period < 1e-9, worst_period, 1e-9);

  const bool trace_allowed = !cfg.disk.trace.require_mu_below_pi2 || cfg.mu < kPi * kPi;
  if (!trace_allowed) return out;
  const int Z = sol.zeros_per_period();
  int bad_counts = 0;
  for (double y : kernels::linspace(cfg.disk.y_min, cfg.disk.y_max, 24))
    if (count_sign_changes(sol, y) != Z) ++bad_counts;
  add_check(out, "sign_changes", bad_counts == 0, bad_counts, 0.0, "2n per period at 24 heights");

  DiskDensities d(p.setup, sol, cfg.disk);
  int crossings = 0;
  for (double y : kernels::linspace(cfg.disk.y_min, cfg.disk.y_max, 200)) {
    std::vector<double> xs;
    for (const auto& c : d.curves()) xs.push_back(c.x_at(y));
    for (std::size_t j = 0; j + 1 < xs.size(); ++j)
      if (!(xs[j] < xs[j + 1])) ++crossings;
    if (!(xs.back() < xs.front() + kTwoPi)) ++crossings;
  }
  add_check(out, "curves_disjoint", crossings == 0, crossings, 0.0);
  // relative to |expected|, or absolute when the expected pitch is below 1 (α = 0 gives 0)
  const double expected = -sol.alpha() / sol.leading_frequency();
  double worst_slope = 0.0;
  for (const auto& c : d.curves())
    worst_slope = std::max(worst_slope, std::abs(c.slope - expected) / std::max(std::abs(expected), 1.0));
  add_check(out, "asymptote_slope", worst_slope < 1e-2, worst_slope, 1e-2);

  std::uniform_real_distribution<double> ur(0.05, 0.95), ut(0.0, kTwoPi);
  int bad_density = 0;
  for (int i = 0; i < 200; ++i) {
    const double r = ur(rng), th = ut(rng);
    const auto u = d.densities_or_zero(r * std::cos(th), r * std::sin(th));
    int positive = 0;
    for (double v : u) {
      if (v < 0.0) ++bad_density;
      if (v > 0.0) ++positive;
    }
    if (positive > 1) ++bad_density;
  }
  add_check(out, "densities_segregated", bad_density == 0, bad_density, 0.0);

  if (cfg.fit.enabled) {
    const SpiralFit f = spiral_fit(d, cfg.fit.r_lo, cfg.fit.r_hi, cfg.fit.samples);
    const double rel = std::abs(f.gamma_fit - f.gamma_expected) / f.gamma_expected;
    add_check(out, "spiral_exponent", rel < 0.02, rel, 0.02, "gamma_fit vs K/2 + 2 alpha^2/K");
  }
  return out;
}

json cmd_verify(const ProblemConfig& cfg) {
  const auto checks = run_verify(cfg);
  json m = base_manifest("verify");
  m["input_hash"] = cfg.hash;
  json table = json::array();
  int failed = 0;
  for (const auto& c : checks) {
    table.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold},
                     {"detail", c.detail}});
    if (!c.passed) ++failed;
  }
  m["checks"] = table;
  m["failed"] = failed;
  write_json(fs::path(cfg.outdir) / "verify.json", m);
  return m;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ResonantMode*>(&e)) return 3;
  if (dynamic_cast<const SingularSystem*>(&e)) return 4;
  if (dynamic_cast<const CurveLost*>(&e)) return 5;
  if (dynamic_cast<const NonConvergence*>(&e)) return 6;
  if (dynamic_cast<const TruncationTooSmall*>(&e)) return 7;
  if (dynamic_cast<const PreconditionFailed*>(&e)) return 9;
  if (dynamic_cast<const InvalidOrder*>(&e)) return 10;
  if (dynamic_cast<const DomainError*>(&e)) return 11;
  if (dynamic_cast<const UnclassifiedPoint*>(&e)) return 12;
  if (dynamic_cast<const InsufficientDecades*>(&e)) return 13;
  if (dynamic_cast<const RayBlocked*>(&e)) return 14;
  if (dynamic_cast<const InvalidMatrix*>(&e)) return 15;
  if (dynamic_cast<const InvalidTraces*>(&e)) return 16;
  return 1;
}

json error_record(const std::exception& e) {
  json j;
  const auto* err = dynamic_cast<const Error*>(&e);
  j["error"] = err ? err->kind() : "UnexpectedError";
  j["message"] = e.what();
  j["exit_code"] = exit_code_for(e);
  if (const auto* r = dynamic_cast<const ResonantMode*>(&e)) j["mode_index"] = r->index();
  if (const auto* r = dynamic_cast<const RayBlocked*>(&e)) j["ray_parameter"] = r->t();
  return j;
}

}  // namespace spiral::cli
