#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "spiral/kernels.hpp"
#include "spiral/specfun.hpp"

namespace spiral {

struct CompetitionSetup {
  int K = 0;
  Eigen::MatrixXd a;     // K×K, diagonal unused
  double alpha = 0.0;    // (1/2π)·log of the cyclic product of a_{i,i+1}/a_{i+1,i}
  std::vector<double> l; // l_1 = 1, l_i = (a_{i,i−1}/a_{i−1,i})·l_{i−1}
  double sigma = 0.0;    // (−1)^K·∏ a_{i−1,i}/a_{i,i−1}, index 0 read as K
};

CompetitionSetup setup_of(const Eigen::MatrixXd& a);

// Competition matrix whose only asymmetry is the cyclic ratio
// a_{i,i+1}/a_{i+1,i} = ratios[i]; every other off-diagonal entry is 1.
Eigen::MatrixXd cyclic_ratio_matrix(const std::vector<double>& ratios);

enum class ArcShape { Bump, Sine, PiecewiseLinear };

// Non-negative profile supported on [x0, x1], zero at both ends.
struct ArcTrace {
  double x0 = 0.0, x1 = 0.0;
  ArcShape shape = ArcShape::Bump;
  double amplitude = 1.0;
  std::vector<double> samples;  // PiecewiseLinear values at equally spaced knots, ends included

  double operator()(double x) const;
  // interior points where the profile is not smooth
  std::vector<double> kinks() const;
};

struct BoundaryTraces {
  std::vector<double> nodes;  // x_1 = 0 < ... < x_{K+1} = 2π
  std::vector<ArcTrace> arcs;

  int K() const { return int(arcs.size()); }
  // arc endpoints copied from nodes; throws InvalidTraces on any violation
  void validate() const;
  double eval(double x) const;  // Σ φ_m(x) for x in [0, 2π]
  // nodes and interior kinks, sorted; where a quadrature should split
  std::vector<double> breakpoints() const;
};

BoundaryTraces make_traces(const std::vector<double>& nodes, const std::vector<ArcTrace>& shapes);
// K equal arcs carrying the same shape
BoundaryTraces uniform_traces(int K, ArcShape shape, double amplitude = 1.0);

// (1/2π)∫₀^{2π} e^{−(ik+α)x}Φ(x)dx, adaptive Gauss-Kronrod between breakpoints.
cplx fourier_coefficient(const std::function<double(double)>& Phi, double alpha, double k,
                         const std::vector<double>& breakpoints = {}, double rel_tol = 1e-10);

// (1/2π)∫ over arc m of e^{−(ik+α)x}φ_m(x)dx
cplx arc_coefficient(const ArcTrace& arc, double alpha, double k, double rel_tol = 1e-10);

// Rows k = −n+1..n, columns m = 1..2n.
Eigen::MatrixXcd fourier_matrix(const BoundaryTraces& t, double alpha,
                                kernels::Exec exec = kernels::Exec::Parallel);

struct CompatResult {
  int n = 0;                  // first active index, K/2
  double alpha = 0.0;
  std::vector<double> c;      // sign-alternating, normalized by max|c_m l_m| = 1
  std::vector<double> sbar;   // (−1)^{m+1} c_m l_m, positive
  cplx phi_n;                 // Fourier coefficient of e^{−αx}Φ at index n
  cplx det_A;
  double imag_residual = 0.0; // leftover imaginary part after the phase rotation
  BoundaryTraces traces;

  double Phi(double x) const;  // Σ c_m φ_m(x)
};

// Linear-algebra core for any even number of arcs; c is returned with
// c_1 > 0 and max|c_m| = 1.
struct CompatVector {
  std::vector<double> c;
  cplx det_A;
  double imag_residual = 0.0;
};
CompatVector compatibility_vector(const BoundaryTraces& t, double alpha,
                                  kernels::Exec exec = kernels::Exec::Parallel);

// Requires even K.
CompatResult compat_solve(const CompetitionSetup& setup, const BoundaryTraces& t);

struct DoubledProblem {
  CompetitionSetup setup;
  BoundaryTraces traces;
};
// Odd K → the 2K problem on the doubled period, in 2π-normalized coordinates.
DoubledProblem double_cover(const CompetitionSetup& setup, const BoundaryTraces& t);

// Full scaling solve for any K ≥ 3. For odd K runs through double_cover and
// `sheets` is 2; `compat` then belongs to the doubled problem.
struct ScalingSolution {
  CompatResult compat;
  int sheets = 1;
  std::vector<double> sbar;    // length K of the original problem
  double fold_mismatch = 0.0;  // max |s̄'_{m+K} − s̄'_m| after doubling
};
ScalingSolution solve_scaling(const CompetitionSetup& setup, const BoundaryTraces& t);

}  // namespace spiral
