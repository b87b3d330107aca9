#include "eik/sfs.hpp"

#include <algorithm>
#include <cmath>

namespace eik {

namespace {

ScalarField clamp_luminance(ScalarField P) {
  for (double& v : P.values()) v = std::clamp(v, LuminanceImage::kMinLuminance, 1.0);
  return P;
}

}  // namespace

LuminanceImage::LuminanceImage(ScalarField P) : P_(clamp_luminance(std::move(P))) {}

LuminanceImage LuminanceImage::from_gray(const GrayImage& img, double spacing) {
  if (img.width == 0 || img.height == 0) throw Error("luminance image is empty");
  const GridSpec g =
      GridSpec::plane(img.height, img.width, {0.0, 0.0}, {spacing, spacing});
  ScalarField P(g);
  for (std::size_t k = 0; k < P.size(); ++k)
    P[k] = static_cast<double>(img.pixels[k]) / img.maxval;
  return LuminanceImage(std::move(P));
}

GrayImage LuminanceImage::to_gray(int maxval) const {
  const GridSpec& g = P_.grid();
  GrayImage img;
  img.height = g.dim(0);
  img.width = g.dim(1);
  img.maxval = maxval;
  img.pixels.resize(P_.size());
  for (std::size_t k = 0; k < P_.size(); ++k)
    img.pixels[k] = static_cast<std::uint16_t>(std::lround(P_[k] * maxval));
  return img;
}

ScalarField sfs_forcing(const LuminanceImage& P) {
  ScalarField f(P.field().grid());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double p = P.field()[k];
    f[k] = std::max(std::sqrt(std::max(1.0 / (p * p) - 1.0, 0.0)), kForcingFloor);
  }
  return f;
}

LuminanceImage render_lambertian(const ScalarField& S) {
  if (S.grid().ndims() != 2) throw Error("render_lambertian: needs a 2D height field");
  const Gradient g = gradient_central(S);
  ScalarField P(S.grid());
  for (std::size_t k = 0; k < P.size(); ++k)
    P[k] = 1.0 / std::sqrt(g.dx[k] * g.dx[k] + g.dy[k] * g.dy[k] + 1.0);
  return LuminanceImage(std::move(P));
}

double gradient_magnitude_error(const ScalarField& estimate, const ScalarField& truth) {
  if (!(estimate.grid() == truth.grid()))
    throw Error("gradient_magnitude_error: grids differ");
  const GridSpec& g = truth.grid();
  const ScalarField a = gradient_magnitude(estimate);
  const ScalarField b = gradient_magnitude(truth);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < g.dim(0); ++i) {
    for (std::size_t j = 1; j + 1 < g.dim(1); ++j) {
      const std::size_t k = g.flat({i, j});
      sum += std::abs(a[k] - b[k]);
      ++count;
    }
  }
  if (count == 0) throw Error("gradient_magnitude_error: grid has no interior nodes");
  return sum / static_cast<double>(count);
}

SfsResult sfs_reconstruct(const LuminanceImage& P, const SourceSet& seeds,
                          const SfsConfig& cfg, const std::optional<ScalarField>& truth) {
  const ScalarField f = sfs_forcing(P);
  SfsResult out;
  if (cfg.backend == SfsBackend::sparse) {
    out.report = sparse_eikonal(f, seeds, cfg.hbar, cfg.sparse);
  } else {
    PerturbConfig pc = cfg.perturb;
    pc.hbar = cfg.hbar;
    out.report = scaled_solve(f, seeds, pc);
  }
  if (truth) {
    out.gradient_error = gradient_magnitude_error(out.report.S_star, *truth);
    out.baseline_error = gradient_magnitude_error(ScalarField(truth->grid()), *truth);
  }
  return out;
}

}  // namespace eik
