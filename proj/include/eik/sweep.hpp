#pragma once

#include "eik/field.hpp"

namespace eik {

struct SweepConfig {
  /// Full passes over all four diagonal orderings.
  int sweeps = 15;
  /// Stop early once a full pass changes no node by more than this.
  double convergence_tol = 0.0;
};

struct SweepStats {
  int passes = 0;
  double last_max_update = 0.0;
};

/// Fast sweeping with the Godunov upwind update on a 2D grid (n x 1 lines
/// included). Sources start at their boundary values, all else at +inf.
ScalarField sweep_solve(const ScalarField& f, const SourceSet& sources,
                        const SweepConfig& cfg = {}, SweepStats* stats = nullptr);

}  // namespace eik
