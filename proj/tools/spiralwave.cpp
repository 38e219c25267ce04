// spiralwave: command-line front end for the rotating spiral solver.
// Thread count comes from SPIRAL_THREADS; everything else is a flag or a
// config key.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "spiral/cli.hpp"
#include "spiral/errors.hpp"

namespace cli = spiral::cli;

namespace {

struct Overrides {
  std::string outdir;
  int truncation = -1;
  int nx = -1, ny = -1;
  int fit_samples = -1;
  bool no_svg = false;
  bool no_fit = false;
};

cli::ProblemConfig load(const std::string& path, const Overrides& o) {
  cli::ProblemConfig cfg = cli::load_config(path);
  if (!o.outdir.empty()) cfg.outdir = o.outdir;
  if (o.truncation >= 0) cfg.assemble.truncation = o.truncation;
  if (o.nx > 1) cfg.grid.nx = o.nx;
  if (o.ny > 1) cfg.grid.ny = o.ny;
  if (o.fit_samples > 2) cfg.fit.samples = o.fit_samples;
  if (o.no_svg) cfg.svg = false;
  if (o.no_fit) cfg.fit.enabled = false;
  cfg.hash = cli::sha256_hex(cli::canonical_config(cfg));
  return cfg;
}

void add_config_flags(CLI::App* sub, std::string& config, Overrides& o) {
  sub->add_option("-c,--config", config, "problem config (YAML)")->required();
  sub->add_option("-o,--outdir", o.outdir, "output directory, overrides output.dir");
  sub->add_option("--truncation", o.truncation, "number of Fourier modes N, 0 = automatic");
  sub->add_option("--nx", o.nx, "half-plane grid columns");
  sub->add_option("--ny", o.ny, "half-plane grid rows");
  sub->add_option("--fit-samples", o.fit_samples, "radii used by the spiral fit");
  sub->add_flag("--no-svg", o.no_svg, "skip the plots");
  sub->add_flag("--no-fit", o.no_fit, "skip the spiral fit");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* t = std::getenv("SPIRAL_THREADS")) spiral::kernels::set_threads(std::atoi(t));

  CLI::App app{"Rotating spiral waves in competition-diffusion segregation"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  std::string config;
  Overrides o;
  std::string outdir = "out";
  auto* solve = app.add_subcommand("solve", "solve a configured problem and write all artifacts");
  add_config_flags(solve, config, o);
  auto* sbar = app.add_subcommand("sbar", "compatibility scalings and the Fourier determinant");
  add_config_flags(sbar, config, o);
  auto* verify = app.add_subcommand("verify", "run the invariant checks and print a pass/fail table");
  add_config_flags(verify, config, o);

  cli::ResonanceQuery rq;
  auto* res = app.add_subcommand("resonances", "zeros of the mode profile in an (omega, mu) window");
  res->add_option("-k", rq.k, "mode index")->capture_default_str();
  res->add_option("--alpha", rq.alpha, "asymmetry parameter")->capture_default_str();
  res->add_option("--omega-min", rq.omega_min)->capture_default_str();
  res->add_option("--omega-max", rq.omega_max)->capture_default_str();
  res->add_option("--mu-min", rq.mu_min)->capture_default_str();
  res->add_option("--mu-max", rq.mu_max)->capture_default_str();
  res->add_option("--spacing", rq.spacing, "search grid spacing in the lambda plane")->capture_default_str();
  res->add_option("-o,--outdir", rq.outdir)->capture_default_str();

  cli::EntireQuery eq;
  bool entire_no_svg = false;
  auto* ent = app.add_subcommand("entire", "single-mode solution on the whole plane");
  ent->add_option("-k", eq.k)->capture_default_str();
  ent->add_option("--alpha", eq.alpha)->capture_default_str();
  ent->add_option("--omega", eq.omega)->capture_default_str();
  ent->add_option("--mu", eq.mu)->capture_default_str();
  ent->add_option("--radius", eq.radius, "largest radius shown")->capture_default_str();
  ent->add_option("-n", eq.n, "grid size")->capture_default_str();
  ent->add_option("-o,--outdir", eq.outdir)->capture_default_str();
  ent->add_flag("--no-svg", entire_no_svg);

  cli::CaloricQuery cq;
  bool caloric_no_svg = false;
  auto* cal = app.add_subcommand("caloric", "rotating caloric function");
  cal->add_option("-k", cq.k)->capture_default_str();
  cal->add_option("--omega", cq.omega)->capture_default_str();
  cal->add_option("-t", cq.t, "time")->capture_default_str();
  cal->add_option("--radius", cq.radius)->capture_default_str();
  cal->add_option("-n", cq.n, "grid size")->capture_default_str();
  cal->add_option("-o,--outdir", cq.outdir)->capture_default_str();
  cal->add_flag("--no-svg", caloric_no_svg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve->parsed() || sbar->parsed() || verify->parsed()) outdir = o.outdir;
    if (res->parsed()) outdir = rq.outdir;
    if (ent->parsed()) outdir = eq.outdir;
    if (cal->parsed()) outdir = cq.outdir;

    if (solve->parsed()) {
      const auto cfg = load(config, o);
      outdir = cfg.outdir;
      std::cout << cli::cmd_solve(cfg).dump(2) << '\n';
    } else if (sbar->parsed()) {
      const auto cfg = load(config, o);
      outdir = cfg.outdir;
      std::cout << cli::cmd_sbar(cfg).dump(2) << '\n';
    } else if (verify->parsed()) {
      const auto cfg = load(config, o);
      outdir = cfg.outdir;
      const auto m = cli::cmd_verify(cfg);
      std::printf("%-24s %-6s %-14s %s\n", "check", "result", "value", "threshold");
      for (const auto& c : m["checks"])
        std::printf("%-24s %-6s %-14.6g %.3g\n", c["name"].get<std::string>().c_str(),
                    c["passed"].get<bool>() ? "PASS" : "FAIL", c["value"].get<double>(),
                    c["threshold"].get<double>());
      std::printf("%d failed\n", m["failed"].get<int>());
      return m["failed"].get<int>() == 0 ? 0 : cli::kExitVerifyFailed;
    } else if (res->parsed()) {
      std::cout << cli::cmd_resonances(rq).dump(2) << '\n';
    } else if (ent->parsed()) {
      eq.svg = !entire_no_svg;
      std::cout << cli::cmd_entire(eq).dump(2) << '\n';
    } else if (cal->parsed()) {
      cq.svg = !caloric_no_svg;
      std::cout << cli::cmd_caloric(cq).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    const auto rec = cli::error_record(e);
    std::cerr << rec.dump() << '\n';
    if (!outdir.empty()) {
      try {
        cli::write_json(std::filesystem::path(outdir) / "error.json", rec);
      } catch (const std::exception&) {
        // the record on stderr is enough
      }
    }
    return rec["exit_code"].get<int>();
  }
  return 0;
}
