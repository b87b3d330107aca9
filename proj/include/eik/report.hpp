#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eik/field.hpp"
#include "eik/io.hpp"

namespace eik {

/// Result of any eikonal backend. Fields that only some backends produce
/// are optional.
struct SolveReport {
  std::string backend;
  ScalarField S_star;
  ScalarField phi;  // strictly positive; empty for backends without a wave function
  double hbar = 0.0;

  // Perturbation series diagnostics.
  std::optional<double> ftilde;
  std::optional<double> c0_bound;
  std::vector<double> term_norms;  // l2 norm of each phi_i, i = 0..T

  // Linear solver diagnostics.
  std::optional<std::size_t> iterations;
  std::optional<double> linear_residual;
  /// Constant removed from -hbar log(phi) so that S*(y_k) matches the seeds.
  double gauge_offset = 0.0;

  /// RMS of (|grad S|^2 - hbar lap S - f^2) / f^2 on interior nodes more
  /// than ten cells from every source. NaN when no node qualifies.
  double viscosity_residual_rms = 0.0;
  /// Nodes where phi hit the positivity floor before the logarithm.
  std::vector<Index> floored;
  std::vector<std::string> warnings;
  std::chrono::duration<double> wall_time{0.0};
};

/// Shared post-processing: clamp phi at `floor`, record floored nodes and
/// return -hbar log(phi). Throws if every node is at the floor.
ScalarField log_transform(ScalarField& phi, double hbar, double floor,
                          std::vector<Index>& floored);

double viscosity_residual_rms(const ScalarField& S, const ScalarField& f, double hbar,
                              const SourceSet& sources);

/// Key-value form of a report. Wall time is left out so that report files
/// are reproducible; it is recorded in the run manifest instead.
io::KeyValues to_key_values(const SolveReport& report);

}  // namespace eik
