#include "eik/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eik {

void PerturbConfig::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error("perturb: hbar must be positive");
  if (terms < 0) throw Error("perturb: number of terms must be nonnegative");
  if (ftilde && !(*ftilde > 0.0 && std::isfinite(*ftilde)))
    throw Error("perturb: fixed f~ must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("perturb: tau must be positive");
  if (!(phi_floor > 0.0)) throw Error("perturb: phi floor must be positive");
}

void require_positive_forcing(const ScalarField& f) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(f[k] > 0.0) || !std::isfinite(f[k])) {
      const Index idx = f.grid().unflat(k);
      std::ostringstream os;
      os << "forcing function must be bounded away from zero; f = " << f[k]
         << " at node (" << idx.i << "," << idx.j << ")";
      throw Error(os.str());
    }
  }
}

double optimal_ftilde(const ScalarField& f) {
  require_positive_forcing(f);
  const double lo = f.min(), hi = f.max();
  return std::sqrt(0.5 * (lo * lo + hi * hi));
}

double c0_upper_bound(const ScalarField& f, double ftilde) {
  if (!(ftilde > 0.0)) throw Error("c0_upper_bound: f~ must be positive");
  const double t2 = ftilde * ftilde;
  double sup = 0.0;
  for (double v : f.values()) sup = std::max(sup, std::abs(v * v - t2));
  return sup / t2;
}

ScalarField phi_zero(const GridSpec& grid, const SourceSet& sources, double ftilde,
                     double hbar, Phi0Path path, const ConvPolicy& conv) {
  sources.validate(grid);
  const KernelParams p{hbar, ftilde, grid.ndims()};
  p.validate();
  const double hmin = sources.min_value();
  std::vector<double> weight;
  for (double h : sources.boundary_values()) weight.push_back(std::exp(-(h - hmin) / hbar));

  if (path == Phi0Path::automatic)
    path = sources.size() <= 64 ? Phi0Path::direct : Phi0Path::convolution;

  if (path == Phi0Path::direct) {
    ScalarField out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto x = grid.world(grid.unflat(k));
      double s = 0.0;
      for (std::size_t m = 0; m < sources.size(); ++m) {
        const auto y = grid.world(sources.points()[m]);
        s += weight[m] * modified_green(std::hypot(x[0] - y[0], x[1] - y[1]), p);
      }
      out[k] = s;
    }
    return out;
  }

  ScalarField delta(grid);
  for (std::size_t m = 0; m < sources.size(); ++m)
    delta.at(sources.points()[m]) = weight[m];
  const KernelExtent extent =
      conv.mode == ConvMode::circular ? KernelExtent::same_grid : KernelExtent::offsets;
  const ScalarField g = kernel_field(grid, p, KernelKind::modified, conv, extent);
  return convolve(delta, g, conv, false);
}

SolveReport perturb_solve(const ScalarField& f, const SourceSet& sources,
                          const PerturbConfig& cfg, const SeriesObserver& observer) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  require_positive_forcing(f);
  const GridSpec& grid = f.grid();
  sources.validate(grid);

  SolveReport rep;
  rep.backend = "perturb";
  rep.hbar = cfg.hbar;
  const double ft = cfg.ftilde ? *cfg.ftilde : optimal_ftilde(f);
  rep.ftilde = ft;
  rep.c0_bound = c0_upper_bound(f, ft);
  if (*rep.c0_bound >= 1.0) {
    std::ostringstream os;
    os << "contraction bound c0 <= " << *rep.c0_bound
       << " is not below 1; the series may diverge";
    rep.warnings.push_back(os.str());
  }

  auto l2 = [](const ScalarField& v) {
    double s = 0.0;
    for (double x : v.values()) s += x * x;
    return std::sqrt(s);
  };

  ScalarField term = phi_zero(grid, sources, ft, cfg.hbar, cfg.phi0_path, cfg.conv);
  ScalarField phi = term;
  rep.term_norms.push_back(l2(term));
  if (observer) observer(0, phi);

  if (cfg.terms > 0) {
    const KernelParams p{cfg.hbar, ft, grid.ndims()};
    const KernelExtent extent = cfg.conv.mode == ConvMode::circular
                                    ? KernelExtent::same_grid
                                    : KernelExtent::offsets;
    const ScalarField green = kernel_field(grid, p, cfg.series_kernel, cfg.conv, extent);
    std::vector<double> perturbation(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) perturbation[k] = f[k] * f[k] - ft * ft;

    for (int i = 1; i <= cfg.terms; ++i) {
      ScalarField psi(grid);
      for (std::size_t k = 0; k < grid.size(); ++k) psi[k] = perturbation[k] * term[k];
      term = convolve(psi, green, cfg.conv, true);
      rep.term_norms.push_back(l2(term));
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      for (std::size_t k = 0; k < grid.size(); ++k) phi[k] += sign * term[k];
      if (observer) observer(i, phi);
    }
  }

  rep.S_star = log_transform(phi, cfg.hbar, cfg.phi_floor, rep.floored);
  const double hmin = sources.min_value();
  if (hmin != 0.0)
    for (double& v : rep.S_star.values()) v += hmin;
  if (!rep.floored.empty())
    rep.warnings.push_back(std::to_string(rep.floored.size()) +
                           " nodes clamped at the positivity floor");
  rep.phi = std::move(phi);
  rep.viscosity_residual_rms = viscosity_residual_rms(rep.S_star, f, cfg.hbar, sources);
  rep.wall_time = std::chrono::steady_clock::now() - t0;
  return rep;
}

SolveReport scaled_solve(const ScalarField& f, const SourceSet& sources,
                         const PerturbConfig& cfg, const SeriesObserver& observer) {
  cfg.validate();
  if (cfg.tau < 1.0) throw Error("scaled_solve: tau must be at least 1");
  if (cfg.tau == 1.0) return perturb_solve(f, sources, cfg, observer);

  const auto t0 = std::chrono::steady_clock::now();
  const double tau = cfg.tau;
  std::vector<double> values(f.values().begin(), f.values().end());
  const ScalarField shrunk(f.grid().scaled(tau), std::move(values));
  std::vector<double> heights = sources.boundary_values();
  for (double& h : heights) h /= tau;
  const SourceSet scaled_sources(sources.points(), heights);

  SolveReport rep = perturb_solve(shrunk, scaled_sources, cfg, observer);
  std::vector<double> s(rep.S_star.values().begin(), rep.S_star.values().end());
  for (double& v : s) v *= tau;
  rep.S_star = ScalarField(f.grid(), std::move(s));
  std::vector<double> p(rep.phi.values().begin(), rep.phi.values().end());
  rep.phi = ScalarField(f.grid(), std::move(p));
  rep.backend = "perturb-scaled";
  rep.viscosity_residual_rms = viscosity_residual_rms(rep.S_star, f, cfg.hbar * tau, sources);
  rep.wall_time = std::chrono::steady_clock::now() - t0;
  return rep;
}

}  // namespace eik
