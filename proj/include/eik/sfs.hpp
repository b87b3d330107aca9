#pragma once

#include <optional>

#include "eik/field.hpp"
#include "eik/perturb.hpp"
#include "eik/pgm.hpp"
#include "eik/report.hpp"
#include "eik/sparse.hpp"

namespace eik {

/// Luminance P = <n, d> under vertical light d = (0, 0, 1), clamped into
/// [kMinLuminance, 1]. Near P = 0 the forcing blows up, so the clamp keeps
/// f bounded.
class LuminanceImage {
 public:
  static constexpr double kMinLuminance = 0.05;

  explicit LuminanceImage(ScalarField P);
  /// Pixel / maxval on a grid with node (row, col) and the given spacing.
  static LuminanceImage from_gray(const GrayImage& img, double spacing = 1.0);

  const ScalarField& field() const { return P_; }
  GrayImage to_gray(int maxval = 255) const;

 private:
  ScalarField P_;
};

/// Lower bound applied to the forcing where P = 1 (flat patches).
inline constexpr double kForcingFloor = 1e-3;

/// f = sqrt(1 / P^2 - 1), raised to kForcingFloor where smaller.
ScalarField sfs_forcing(const LuminanceImage& P);

/// P = 1 / sqrt(|grad S|^2 + 1) from central-difference gradients.
LuminanceImage render_lambertian(const ScalarField& S);

enum class SfsBackend { sparse, perturb };

struct SfsConfig {
  SfsBackend backend = SfsBackend::sparse;
  double hbar = 0.01;
  PerturbConfig perturb;  // hbar is taken from SfsConfig
  SparseOptions sparse;
};

struct SfsResult {
  SolveReport report;
  std::optional<double> gradient_error;  // against the supplied ground truth
  std::optional<double> baseline_error;  // same metric for an all-zero surface
};

/// Mean over interior nodes of | |grad estimate| - |grad truth| |.
double gradient_magnitude_error(const ScalarField& estimate, const ScalarField& truth);

/// Height field from shading: build the forcing, then solve the eikonal
/// with S*(y_k) = h_k at the seeds.
SfsResult sfs_reconstruct(const LuminanceImage& P, const SourceSet& seeds,
                          const SfsConfig& cfg,
                          const std::optional<ScalarField>& truth = std::nullopt);

}  // namespace eik
