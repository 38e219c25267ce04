#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "spiral/cli.hpp"
#include "spiral/errors.hpp"
#include "test_helpers.hpp"

using namespace spiral;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = SPIRAL_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spiralwave_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SPIRAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"(
K: 4
competition:
  alpha: 1
mu: 0
omega: 3
)";

}  // namespace

TEST_CASE("config: defaults and derived fields") {
  const auto cfg = cli::parse_config(kMinimal);
  CHECK(cfg.K == 4);
  CHECK(cfg.traces.K() == 4);
  CHECK(cfg.a(0, 1) == doctest::Approx(std::exp(kTwoPi)));
  CHECK(cfg.hash.size() == 64);
  CHECK(cfg.hash == cli::parse_config(kMinimal).hash);
  CHECK(cfg.hash != cli::parse_config(std::string(kMinimal) + "grid: {nx: 64}\n").hash);
  // the output location is not part of the problem
  CHECK(cfg.hash == cli::parse_config(std::string(kMinimal) + "output: {dir: elsewhere}\n").hash);
}

TEST_CASE("config: schema violations") {
  CHECK_THROWS_AS(cli::parse_config("K: 4\nmu: 0\nomega: 1\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(std::string(kMinimal) + "colour: red\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("K: 4\ncompetition: {alpha: 1, cyclic_ratios: [1,1,1,1]}\nmu: 0\nomega: 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(cli::parse_config("K: 4\ncompetition: {alpha: 1}\nmu: .nan\nomega: 1\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("K: 4\ncompetition: {cyclic_ratios: [1, -1, 1, 1]}\nmu: 0\nomega: 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(cli::load_config(kSource / "configs" / "bad_overlap.yaml"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("K: [4\n"), ConfigError);
  CHECK_THROWS_AS(cli::load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("config: shipped examples parse") {
  for (const char* name : {"k3_ratio10_cw.yaml", "k3_ratio10_ccw.yaml", "symmetric_k4.yaml", "k4_alpha1.yaml"})
    CHECK_NOTHROW(cli::load_config(kSource / "configs" / name));
}

TEST_CASE("exit codes are distinct per error kind") {
  const std::vector<int> codes = {
      cli::exit_code_for(ConfigError("")),        cli::exit_code_for(ResonantMode(1, "")),
      cli::exit_code_for(SingularSystem("")),     cli::exit_code_for(CurveLost("")),
      cli::exit_code_for(NonConvergence("")),     cli::exit_code_for(TruncationTooSmall("")),
      cli::exit_code_for(PreconditionFailed("")), cli::exit_code_for(InvalidOrder("")),
      cli::exit_code_for(DomainError("")),        cli::exit_code_for(UnclassifiedPoint("")),
      cli::exit_code_for(InsufficientDecades("")), cli::exit_code_for(RayBlocked(1.0, "")),
      cli::exit_code_for(InvalidMatrix("")),      cli::exit_code_for(InvalidTraces("")),
      cli::exit_code_for(std::runtime_error("")), cli::kExitVerifyFailed};
  std::set<int> unique(codes.begin(), codes.end());
  CHECK(unique.size() == codes.size());
  CHECK(cli::exit_code_for(ConfigError("")) == 2);
  CHECK(unique.count(0) == 0);
  const auto rec = cli::error_record(ResonantMode(3, "resonant"));
  CHECK(rec["error"] == "ResonantMode");
  CHECK(rec["mode_index"] == 3);
}

TEST_CASE("csv numbers carry 17 significant digits") {
  CHECK(cli::format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(cli::format_number(kPi)) == kPi);
}

TEST_CASE("cli: invalid trace overlap exits with status 2 and an error record") {
  const auto out = scratch("bad");
  CHECK(run("solve -c " + (kSource / "configs" / "bad_overlap.yaml").string() + " -o " + out.string()) == 2);
  const auto rec = nlohmann::json::parse(slurp(out / "error.json"));
  CHECK(rec["error"] == "ConfigError");
  CHECK(rec["exit_code"] == 2);
}

TEST_CASE("cli: symmetric four species report unit scalings") {
  const auto out = scratch("sym");
  REQUIRE(run("sbar -c " + (kSource / "configs" / "symmetric_k4.yaml").string() + " -o " + out.string()) == 0);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  for (const auto& s : m["setup"]["sbar"]) CHECK(std::abs(s.get<double>() - 1.0) < 1e-6);
}

TEST_CASE("cli: solve writes deterministic artifacts") {
  const auto a = scratch("solve_a"), b = scratch("solve_b");
  const std::string cfg = (kSource / "configs" / "k4_alpha1.yaml").string();
  const std::string flags = " --nx 64 --ny 32 --fit-samples 12 --no-svg";
  REQUIRE(run("solve -c " + cfg + " -o " + a.string() + flags) == 0);
  REQUIRE(run("solve -c " + cfg + " -o " + b.string() + flags) == 0);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  CHECK(slurp(a / "densities.csv") == slurp(b / "densities.csv"));
  for (const char* f : {"v_halfplane.csv", "nodal_curves.csv", "densities.csv", "spiral_fit.csv"})
    CHECK(fs::exists(a / f));
  const std::string header = slurp(a / "densities.csv").substr(0, 22);
  CHECK(header == "r,theta,u1,u2,u3,u4\n0.");
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["tool_version"] == cli::kToolVersion);
  CHECK(m["input_hash"].get<std::string>().size() == 64);
  CHECK(m["setup"]["n"] == 2);
}

TEST_CASE("cli: resonances, entire, caloric, verify") {
  const auto out = scratch("misc");
  REQUIRE(run("resonances -k 1 --alpha 1 -o " + (out / "res").string()) == 0);
  const auto r = nlohmann::json::parse(slurp(out / "res" / "manifest.json"));
  CHECK(r["zeros"].size() == 3);
  CHECK(run("entire -k 1 --alpha 0.5 --omega 2 --mu 0 -n 41 -o " + (out / "ent").string()) == 0);
  CHECK(fs::exists(out / "ent" / "field.svg"));
  CHECK(run("entire -k 1 --alpha 1 --omega 10.3607565091 --mu 23.6562193878 -n 41 -o " + (out / "blk").string()) ==
        14);
  CHECK(run("caloric -k 1 --omega 1 -n 41 -o " + (out / "cal").string()) == 0);
  const auto c = nlohmann::json::parse(slurp(out / "cal" / "manifest.json"));
  CHECK(c["sign_changes_half_radius"] == 2);
  CHECK(run("verify -c " + (kSource / "configs" / "k4_alpha1.yaml").string() + " --fit-samples 12 -o " +
            (out / "ver").string()) == 0);
  // α = 0: the expected pitch is zero
  CHECK(run("verify -c " + (kSource / "configs" / "symmetric_k4.yaml").string() + " --fit-samples 12 -o " +
            (out / "ver0").string()) == 0);
  CHECK(run("frobnicate") != 0);
}
