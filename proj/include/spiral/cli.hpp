#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include "json.hpp"
#include <string>
#include <vector>

#include "spiral/compat.hpp"
#include "spiral/diskmap.hpp"
#include "spiral/halfplane.hpp"
#include "spiral/specfun.hpp"

namespace spiral::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct GridConfig {
  int nx = 256;         // half-plane samples over one period
  int ny = 128;
  double y_lo = 0.05;   // half-plane rows
  double y_hi = 4.0;
  int nr = 120;         // polar density samples
  int ntheta = 240;
  double r_min = 1e-3;
  double r_max = 0.95;
};

struct FitConfig {
  double r_lo = 1e-3;
  double r_hi = 1e-1;
  int samples = 40;
  bool enabled = true;
};

struct ProblemConfig {
  int K = 0;
  Eigen::MatrixXd a;
  double mu = 0.0;
  double omega = 0.0;
  BoundaryTraces traces;
  AssembleOptions assemble;
  DiskOptions disk;
  GridConfig grid;
  FitConfig fit;
  std::string outdir = "out";
  bool svg = true;
  std::string hash;  // SHA-256 of the canonical form
};

// Parses and validates; every violation is a ConfigError naming the key.
ProblemConfig parse_config(const std::string& yaml_text);
ProblemConfig load_config(const std::filesystem::path& path);
// Canonical YAML rendering used for hashing.
std::string canonical_config(const ProblemConfig& cfg);
std::string sha256_hex(const std::string& bytes);

// writers
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::string format_number(double v);  // 17 significant digits
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
// filled contour plot of a row-major grid, a convenience layer only
void write_svg_contour(const std::filesystem::path& path, const kernels::Grid<double>& g,
                       const std::string& title);
void write_svg_species(const std::filesystem::path& path, const std::vector<double>& X,
                       const std::vector<double>& Y, const std::vector<int>& label, int K,
                       const std::string& title);

nlohmann::json complex_json(cplx z);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

// Commands return the manifest they also write to the output directory.
nlohmann::json cmd_solve(const ProblemConfig& cfg);
nlohmann::json cmd_sbar(const ProblemConfig& cfg);

struct ResonanceQuery {
  int k = 1;
  double alpha = 1.0;
  double omega_min = 0.0, omega_max = 40.0;
  double mu_min = 0.0, mu_max = 140.0;
  double spacing = 0.5;
  std::string outdir = "out";
};
nlohmann::json cmd_resonances(const ResonanceQuery& q);

struct EntireQuery {
  int k = 1;
  double alpha = 0.5;
  double omega = 1.0;
  double mu = 0.0;
  double radius = 20.0;  // disk image of y ∈ [−log radius, …]
  int n = 201;
  std::string outdir = "out";
  bool svg = true;
};
nlohmann::json cmd_entire(const EntireQuery& q);

struct CaloricQuery {
  int k = 1;
  double omega = 1.0;
  double t = 0.0;
  double radius = 20.0;
  int n = 201;
  std::string outdir = "out";
  bool svg = true;
};
nlohmann::json cmd_caloric(const CaloricQuery& q);

std::vector<VerifyCheck> run_verify(const ProblemConfig& cfg);
nlohmann::json cmd_verify(const ProblemConfig& cfg);

// Distinct exit status per error kind; 0 is success, 8 a failed verify table.
int exit_code_for(const std::exception& e);
inline constexpr int kExitVerifyFailed = 8;
// Machine-readable record written to stderr and to outdir/error.json.
nlohmann::json error_record(const std::exception& e);

}  // namespace spiral::cli
