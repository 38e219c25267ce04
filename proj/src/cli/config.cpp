#include <yaml-cpp/yaml.h>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "spiral/cli.hpp"
#include "spiral/errors.hpp"

namespace spiral::cli {

namespace {

void only_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) throw ConfigError(where + ": expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": cannot read '" + node.Scalar() + "'");
  }
}

double finite(const YAML::Node& node, const std::string& where) {
  const double v = scalar<double>(node, where);
  if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
  return v;
}

template <class T>
void optional(const YAML::Node& parent, const char* key, const std::string& where, T& out) {
  if (parent[key]) out = scalar<T>(parent[key], where + "." + key);
}

void optional_finite(const YAML::Node& parent, const char* key, const std::string& where, double& out) {
  if (parent[key]) out = finite(parent[key], where + "." + key);
}

std::vector<double> number_list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ConfigError(where + ": expected a list");
  std::vector<double> v;
  for (std::size_t i = 0; i < node.size(); ++i) v.push_back(finite(node[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

ArcShape shape_of(const std::string& s, const std::string& where) {
  if (s == "bump") return ArcShape::Bump;
  if (s == "sine") return ArcShape::Sine;
  if (s == "piecewise_linear") return ArcShape::PiecewiseLinear;
  throw ConfigError(where + ": shape must be bump, sine or piecewise_linear");
}

const char* shape_name(ArcShape s) {
  switch (s) {
    case ArcShape::Bump: return "bump";
    case ArcShape::Sine: return "sine";
    case ArcShape::PiecewiseLinear: return "piecewise_linear";
  }
  return "bump";
}

Eigen::MatrixXd read_competition(const YAML::Node& node, int K) {
  only_keys(node, "competition", {"matrix", "cyclic_ratios", "alpha"});
  const int given = int(bool(node["matrix"])) + int(bool(node["cyclic_ratios"])) + int(bool(node["alpha"]));
  if (given != 1) throw ConfigError("competition: give exactly one of matrix, cyclic_ratios, alpha");
  if (node["matrix"]) {
    const YAML::Node m = node["matrix"];
    if (!m.IsSequence() || int(m.size()) != K) throw ConfigError("competition.matrix: expected K rows");
    Eigen::MatrixXd a(K, K);
    for (int i = 0; i < K; ++i) {
      const auto row = number_list(m[i], "competition.matrix[" + std::to_string(i) + "]");
      if (int(row.size()) != K) throw ConfigError("competition.matrix: expected K columns");
      for (int j = 0; j < K; ++j) a(i, j) = row[j];
    }
    return a;
  }
  if (node["cyclic_ratios"]) {
    const auto r = number_list(node["cyclic_ratios"], "competition.cyclic_ratios");
    if (int(r.size()) != K) throw ConfigError("competition.cyclic_ratios: expected K entries");
    for (double v : r)
      if (!(v > 0.0)) throw ConfigError("competition.cyclic_ratios: entries must be positive");
    return cyclic_ratio_matrix(r);
  }
  const double alpha = finite(node["alpha"], "competition.alpha");
  std::vector<double> r(K, 1.0);
  r[0] = std::exp(kTwoPi * alpha);
  return cyclic_ratio_matrix(r);
}

BoundaryTraces read_traces(const YAML::Node& node, int K) {
  std::vector<double> nodes(K + 1);
  for (int m = 0; m <= K; ++m) nodes[m] = kTwoPi * m / K;
  ArcTrace base;
  std::vector<ArcTrace> arcs;
  if (node) {
    only_keys(node, "traces", {"nodes", "shape", "amplitude", "samples", "arcs"});
    if (node["nodes"]) {
      nodes = number_list(node["nodes"], "traces.nodes");
      if (int(nodes.size()) != K + 1) throw ConfigError("traces.nodes: expected K+1 entries");
    }
    if (node["shape"]) base.shape = shape_of(scalar<std::string>(node["shape"], "traces.shape"), "traces.shape");
    optional_finite(node, "amplitude", "traces", base.amplitude);
    if (node["samples"]) base.samples = number_list(node["samples"], "traces.samples");
    if (node["arcs"]) {
      const YAML::Node list = node["arcs"];
      if (!list.IsSequence() || int(list.size()) != K) throw ConfigError("traces.arcs: expected K entries");
      for (int m = 0; m < K; ++m) {
        const std::string where = "traces.arcs[" + std::to_string(m) + "]";
        only_keys(list[m], where, {"shape", "amplitude", "samples"});
        ArcTrace a = base;
        if (list[m]["shape"]) a.shape = shape_of(scalar<std::string>(list[m]["shape"], where + ".shape"), where);
        optional_finite(list[m], "amplitude", where, a.amplitude);
        if (list[m]["samples"]) a.samples = number_list(list[m]["samples"], where + ".samples");
        arcs.push_back(a);
      }
    }
  }
  if (arcs.empty()) arcs.assign(K, base);
  for (auto& a : arcs)
    if (a.shape == ArcShape::PiecewiseLinear && a.samples.empty()) a.samples = {0.0, 1.0, 0.0};
  try {
    return make_traces(nodes, arcs);
  } catch (const InvalidTraces& e) {
    throw ConfigError(std::string("traces: ") + e.what());
  }
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

ProblemConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  only_keys(root, "config", {"K", "competition", "mu", "omega", "traces", "numerics", "grid", "fit", "output"});
  for (const char* key : {"K", "competition", "mu", "omega"})
    if (!root[key]) throw ConfigError(std::string("config: missing required key '") + key + "'");

  ProblemConfig cfg;
  cfg.K = scalar<int>(root["K"], "K");
  if (cfg.K < 2) throw ConfigError("K: need at least two species");
  cfg.a = read_competition(root["competition"], cfg.K);
  cfg.mu = finite(root["mu"], "mu");
  cfg.omega = finite(root["omega"], "omega");
  cfg.traces = read_traces(root["traces"], cfg.K);
  try {
    (void)setup_of(cfg.a);
  } catch (const Error& e) {
    throw ConfigError(std::string("competition: ") + e.what());
  }

  if (const YAML::Node n = root["numerics"]) {
    only_keys(n, "numerics",
              {"truncation", "max_truncation", "truncation_rel_tol", "series_tail_tol", "waive_mu_bound",
               "resonance_tol", "y_min", "y_max", "band_tol", "max_step", "curve_tol", "require_mu_below_pi2"});
    optional(n, "truncation", "numerics", cfg.assemble.truncation);
    optional(n, "max_truncation", "numerics", cfg.assemble.max_truncation);
    optional_finite(n, "truncation_rel_tol", "numerics", cfg.assemble.truncation_rel_tol);
    optional_finite(n, "series_tail_tol", "numerics", cfg.assemble.series_tail_tol);
    optional(n, "waive_mu_bound", "numerics", cfg.assemble.waive_mu_bound);
    optional_finite(n, "resonance_tol", "numerics", cfg.assemble.resonance_tol);
    optional_finite(n, "y_min", "numerics", cfg.disk.y_min);
    optional_finite(n, "y_max", "numerics", cfg.disk.y_max);
    optional_finite(n, "band_tol", "numerics", cfg.disk.band_tol);
    optional_finite(n, "max_step", "numerics", cfg.disk.trace.max_step);
    optional_finite(n, "curve_tol", "numerics", cfg.disk.trace.curve_tol);
    optional(n, "require_mu_below_pi2", "numerics", cfg.disk.trace.require_mu_below_pi2);
  }
  if (cfg.assemble.truncation < 0 || cfg.assemble.max_truncation < 8)
    throw ConfigError("numerics: truncation must be >= 0 and max_truncation >= 8");
  if (!(cfg.disk.y_min > 0.0 && cfg.disk.y_max > cfg.disk.y_min))
    throw ConfigError("numerics: need 0 < y_min < y_max");

  if (const YAML::Node g = root["grid"]) {
    only_keys(g, "grid", {"nx", "ny", "y_lo", "y_hi", "nr", "ntheta", "r_min", "r_max"});
    optional(g, "nx", "grid", cfg.grid.nx);
    optional(g, "ny", "grid", cfg.grid.ny);
    optional_finite(g, "y_lo", "grid", cfg.grid.y_lo);
    optional_finite(g, "y_hi", "grid", cfg.grid.y_hi);
    optional(g, "nr", "grid", cfg.grid.nr);
    optional(g, "ntheta", "grid", cfg.grid.ntheta);
    optional_finite(g, "r_min", "grid", cfg.grid.r_min);
    optional_finite(g, "r_max", "grid", cfg.grid.r_max);
  }
  if (cfg.grid.nx < 2 || cfg.grid.ny < 2 || cfg.grid.nr < 2 || cfg.grid.ntheta < 2)
    throw ConfigError("grid: sizes must be at least 2");
  if (!(cfg.grid.y_lo >= 0.0 && cfg.grid.y_hi > cfg.grid.y_lo)) throw ConfigError("grid: need 0 <= y_lo < y_hi");
  if (!(cfg.grid.r_min > 0.0 && cfg.grid.r_max > cfg.grid.r_min && cfg.grid.r_max < 1.0))
    throw ConfigError("grid: need 0 < r_min < r_max < 1");

  if (const YAML::Node f = root["fit"]) {
    only_keys(f, "fit", {"r_lo", "r_hi", "samples", "enabled"});
    optional_finite(f, "r_lo", "fit", cfg.fit.r_lo);
    optional_finite(f, "r_hi", "fit", cfg.fit.r_hi);
    optional(f, "samples", "fit", cfg.fit.samples);
    optional(f, "enabled", "fit", cfg.fit.enabled);
  }
  if (const YAML::Node o = root["output"]) {
    only_keys(o, "output", {"dir", "svg"});
    optional(o, "dir", "output", cfg.outdir);
    optional(o, "svg", "output", cfg.svg);
  }
  cfg.hash = sha256_hex(canonical_config(cfg));
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ProblemConfig& cfg) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "K" << YAML::Value << cfg.K;
  e << YAML::Key << "competition" << YAML::Value << YAML::BeginSeq;
  for (int i = 0; i < cfg.K; ++i) {
    e << YAML::Flow << YAML::BeginSeq;
    for (int j = 0; j < cfg.K; ++j) e << num(cfg.a(i, j));
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "mu" << YAML::Value << num(cfg.mu);
  e << YAML::Key << "omega" << YAML::Value << num(cfg.omega);
  e << YAML::Key << "nodes" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : cfg.traces.nodes) e << num(x);
  e << YAML::EndSeq;
  e << YAML::Key << "arcs" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : cfg.traces.arcs) {
    e << YAML::Flow << YAML::BeginSeq << shape_name(a.shape) << num(a.amplitude);
    for (double s : a.samples) e << num(s);
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "numerics" << YAML::Value << YAML::Flow << YAML::BeginSeq << cfg.assemble.truncation
    << cfg.assemble.max_truncation << num(cfg.assemble.truncation_rel_tol) << num(cfg.assemble.series_tail_tol)
    << cfg.assemble.waive_mu_bound << num(cfg.assemble.resonance_tol) << num(cfg.disk.y_min)
    << num(cfg.disk.y_max) << num(cfg.disk.band_tol) << num(cfg.disk.trace.max_step)
    << num(cfg.disk.trace.curve_tol) << cfg.disk.trace.require_mu_below_pi2 << YAML::EndSeq;
  e << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginSeq << cfg.grid.nx << cfg.grid.ny
    << num(cfg.grid.y_lo) << num(cfg.grid.y_hi) << cfg.grid.nr << cfg.grid.ntheta << num(cfg.grid.r_min)
    << num(cfg.grid.r_max) << YAML::EndSeq;
  e << YAML::Key << "fit" << YAML::Value << YAML::Flow << YAML::BeginSeq << num(cfg.fit.r_lo) << num(cfg.fit.r_hi)
    << cfg.fit.samples << cfg.fit.enabled << YAML::EndSeq;
  e << YAML::EndMap;
  return e.c_str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

}  // namespace spiral::cli
