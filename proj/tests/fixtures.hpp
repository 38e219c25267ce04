#pragma once

#include <cmath>

#include "spiral/compat.hpp"
#include "spiral/halfplane.hpp"

namespace fixtures {

using namespace spiral;

// Four species, cyclic ratio product e^{2π} (α = 1), identical bump arcs.
inline CompetitionSetup k4_alpha1() { return setup_of(cyclic_ratio_matrix({std::exp(kTwoPi), 1.0, 1.0, 1.0})); }

// Three species with every cyclic ratio 10.
inline CompetitionSetup k3_ratios10() { return setup_of(cyclic_ratio_matrix({10.0, 10.0, 10.0})); }

inline HalfPlaneSolution solve(const CompetitionSetup& setup, const BoundaryTraces& t, double mu, double omega,
                               const AssembleOptions& opts = {}) {
  const ScalingSolution s = solve_scaling(setup, t);
  return HalfPlaneSolution::assemble(s.compat, s.sheets, mu, omega, opts);
}

}  // namespace fixtures
