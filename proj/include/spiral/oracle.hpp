#pragma once

#include <vector>

#include "spiral/compat.hpp"

namespace spiral {

struct EigenDiscretization {
  double Y = 20.0;  // truncated domain length
  int M = 4000;     // interior grid points
  double tol = 1e-12;
  int max_iter = 2000;
};

// Smallest λ of −u'' + a²u = λe^{−2y}u on (0, Y), u = 0 at both ends.
// Second-order differences, inverse iteration on the weighted pencil.
double halfline_weighted_eigen(double a, const EigenDiscretization& disc = {});

// Smallest λ of −Δu = λe^{−2y}u on (−a/2, a/2)×(b, ∞) with zero boundary,
// reduced by cos(πx/a) to the half-line problem of order π/a on (b, b+Y).
double strip_weighted_eigen(double a, double b, const EigenDiscretization& disc = {});

struct BruteForceOptions {
  int panels = 4;  // 20-point Gauss panels per arc
};

// Compatibility vector from the cofactor integrals of the Fourier system,
// each evaluated as a (2n−1)-fold tensor Gauss quadrature with the
// exponential determinant taken pointwise. n ≤ 2. Same normalization as
// compatibility_vector: real, c_1 > 0, max|c| = 1.
std::vector<double> brute_force_compat(const BoundaryTraces& t, double alpha,
                                       const BruteForceOptions& opts = {});

}  // namespace spiral
