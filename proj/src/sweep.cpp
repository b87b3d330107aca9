#include "eik/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eik/perturb.hpp"

namespace eik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Godunov upwind local solve for |grad S| = f with neighbour minima a, b.
double upwind_update(double a, double b, double fh) {
  if (std::abs(a - b) >= fh) return std::min(a, b) + fh;
  const double d = a - b;
  return 0.5 * (a + b + std::sqrt(2.0 * fh * fh - d * d));
}

}  // namespace

ScalarField sweep_solve(const ScalarField& f, const SourceSet& sources,
                        const SweepConfig& cfg, SweepStats* stats) {
  const GridSpec& g = f.grid();
  if (g.ndims() != 2) throw Error("sweep_solve: needs a 2D grid");
  if (cfg.sweeps < 1) throw Error("sweep_solve: sweeps must be at least 1");
  if (g.spacing(0) != g.spacing(1))
    throw Error("sweep_solve: the upwind update assumes equal spacing on both axes");
  require_positive_forcing(f);
  sources.validate(g);

  const std::size_t n0 = g.dim(0), n1 = g.dim(1);
  const double h = g.spacing(0);
  std::vector<double> s(g.size(), kInf);
  std::vector<char> fixed(g.size(), 0);
  for (std::size_t m = 0; m < sources.size(); ++m) {
    const std::size_t k = g.flat(sources.points()[m]);
    s[k] = sources.boundary_values()[m];
    fixed[k] = 1;
  }

  auto relax = [&](std::size_t i, std::size_t j) -> double {
    const std::size_t k = i * n1 + j;
    if (fixed[k]) return 0.0;
    const double a = std::min(i > 0 ? s[k - n1] : kInf, i + 1 < n0 ? s[k + n1] : kInf);
    const double b = std::min(j > 0 ? s[k - 1] : kInf, j + 1 < n1 ? s[k + 1] : kInf);
    if (a == kInf && b == kInf) return 0.0;
    const double cand = upwind_update(a, b, f[k] * h);
    if (cand < s[k]) {
      const double change = s[k] == kInf ? kInf : s[k] - cand;
      s[k] = cand;
      return change;
    }
    return 0.0;
  };

  SweepStats st;
  for (int pass = 0; pass < cfg.sweeps; ++pass) {
    double max_update = 0.0;
    for (int order = 0; order < 4; ++order) {
      const bool i_up = order < 2;
      const bool j_up = order % 2 == 0;
      for (std::size_t ii = 0; ii < n0; ++ii) {
        const std::size_t i = i_up ? ii : n0 - 1 - ii;
        for (std::size_t jj = 0; jj < n1; ++jj) {
          const std::size_t j = j_up ? jj : n1 - 1 - jj;
          max_update = std::max(max_update, relax(i, j));
        }
      }
    }
    st.passes = pass + 1;
    st.last_max_update = max_update;
    if (max_update < cfg.convergence_tol) break;
  }
  if (stats) *stats = st;
  return ScalarField(g, std::move(s));
}

}  // namespace eik
