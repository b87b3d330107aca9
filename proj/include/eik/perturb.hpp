#pragma once

#include <functional>
#include <optional>

#include "eik/field.hpp"
#include "eik/kernels.hpp"
#include "eik/report.hpp"

namespace eik {

/// How phi_0 = sum_k exp(-f~ |x - y_k| / hbar) is evaluated.
enum class Phi0Path {
  automatic,  // direct sum for up to 64 sources, kernel convolution beyond
  direct,
  convolution,
};

struct PerturbConfig {
  double hbar = 0.01;
  int terms = 6;
  /// Fixed f~; unset means the minimizer of the contraction bound.
  std::optional<double> ftilde;
  /// Grid scale-down factor used by scaled_solve.
  double tau = 1.0;
  ConvPolicy conv;
  Phi0Path phi0_path = Phi0Path::automatic;
  /// Kernel used for phi_i, i >= 1.
  KernelKind series_kernel = KernelKind::exact;
  double phi_floor = 1e-300;

  void validate() const;
};

/// Called with the partial sum phi_0 - phi_1 + ... +- phi_i after each term.
using SeriesObserver = std::function<void(int term, const ScalarField& partial_phi)>;

/// sqrt((f_min^2 + f_max^2) / 2); minimizes sup|f^2 - f~^2| / f~^2.
double optimal_ftilde(const ScalarField& f);

/// sup over the grid of |f^2 - f~^2| / f~^2, an upper bound on the norm of
/// the perturbation operator. Below 1 the series converges for every hbar.
double c0_upper_bound(const ScalarField& f, double ftilde);

/// Wave function of the constant forcing f~ with Kronecker sources. Seeds
/// with prescribed values h_k are weighted by exp(-(h_k - h_min) / hbar).
ScalarField phi_zero(const GridSpec& grid, const SourceSet& sources, double ftilde,
                     double hbar, Phi0Path path = Phi0Path::automatic,
                     const ConvPolicy& conv = {});

/// Solves -hbar^2 lap(phi) + f^2 phi = sum_k delta(x - y_k) with the
/// alternating series phi_0 - phi_1 + phi_2 - ..., where each
/// phi_i = G * [(f^2 - f~^2) phi_{i-1}], and returns S* = -hbar log(phi).
SolveReport perturb_solve(const ScalarField& f, const SourceSet& sources,
                          const PerturbConfig& cfg, const SeriesObserver& observer = {});

/// perturb_solve on the grid shrunk by cfg.tau, with S* scaled back up.
/// Shrinking the grid keeps exp(-f~ r / hbar) above underflow at small hbar.
SolveReport scaled_solve(const ScalarField& f, const SourceSet& sources,
                         const PerturbConfig& cfg, const SeriesObserver& observer = {});

/// Forcing must be finite and strictly positive everywhere.
void require_positive_forcing(const ScalarField& f);

}  // namespace eik
