#pragma once

#include <utility>

#include "spiral/specfun.hpp"

namespace spiral {

// Parameters of one separated mode. `sheets` = 2 marks a problem lifted to the
// doubled period, where index k carries frequency k/2.
struct ModeParams {
  int k = 1;
  double alpha = 0.0;
  double mu = 0.0;
  double omega = 0.0;
  int sheets = 1;

  double frequency() const { return double(k) / double(sheets); }
};

// ωα − μ + iωκ with κ the frequency
cplx lambda_of(const ModeParams& p);
// sign(κ)(κ − iα)
cplx order_of(const ModeParams& p);

bool is_resonant(const ModeParams& p, double tol = 1e-8, const SeriesConfig& cfg = {});

// Decaying solution of X'' = [ν² + λe^{−2y}]X on y ≥ 0 with X(0) = 1.
class Mode {
 public:
  // Throws ResonantMode when Θ_ν(λ) vanishes to `resonance_tol` relative.
  static Mode build(const ModeParams& p, double resonance_tol = 1e-8, const SeriesConfig& cfg = {});

  cplx eval(double y) const;
  cplx derivative(double y) const;
  std::pair<cplx, cplx> eval_with_derivative(double y) const;

  const ModeParams& params() const { return p_; }
  cplx nu() const { return nu_; }
  cplx lambda() const { return lambda_; }
  // Θ_ν(λ) in the normalization Γ(1+ν)Θ_ν, which is 1 at λ = 0
  cplx theta_at_lambda() const { return theta_lambda_; }

 private:
  ModeParams p_;
  cplx nu_, lambda_, theta_lambda_;
  SeriesConfig cfg_;
};

// Central-difference residual of the mode ODE on the uniform grid y0, y0+h, ..., y1,
// pointwise relative to |X''| + |(ν² + λe^{−2y})X|.
double mode_ode_residual(const Mode& m, double y0, double y1, double h);

enum class Coercivity { MuSmall, OmegaAlphaSmall, SupCondition, Unknown };
const char* to_string(Coercivity c);

struct CoercivityScan {
  double tau_max = 50.0;
  double step = 1e-2;
};

Coercivity coercivity_certificate(const ModeParams& p, const CoercivityScan& scan = {});

struct ModeNorms {
  double l2 = 0.0;
  double h1_seminorm = 0.0;
  double sup = 0.0;
};

ModeNorms mode_norms(const Mode& m);

}  // namespace spiral
