#include "eik/report.hpp"

#include <cmath>
#include <limits>

namespace eik {

ScalarField log_transform(ScalarField& phi, double hbar, double floor,
                          std::vector<Index>& floored) {
  const GridSpec& g = phi.grid();
  floored.clear();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!(phi[k] > floor)) {
      phi[k] = floor;
      floored.push_back(g.unflat(k));
    }
  }
  if (floored.size() == phi.size())
    throw Error(
        "wave function is at the positivity floor everywhere; hbar is too small for "
        "double precision on this grid (try the tau scaling)");
  ScalarField S(g);
  for (std::size_t k = 0; k < phi.size(); ++k) S[k] = -hbar * std::log(phi[k]);
  return S;
}

double viscosity_residual_rms(const ScalarField& S, const ScalarField& f, double hbar,
                              const SourceSet& sources) {
  const GridSpec& g = S.grid();
  for (int a = 0; a < g.ndims(); ++a)
    if (g.dim(a) < 3) return std::numeric_limits<double>::quiet_NaN();
  const Gradient grad = gradient_central(S);
  const ScalarField lap = g.ndims() == 2 ? laplacian_5pt(S) : laplacian_3pt(S);
  const ScalarField dist = distance_to_sources(g, sources);
  double h = g.spacing(0);
  if (g.ndims() == 2) h = std::max(h, g.spacing(1));

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Index idx = g.unflat(k);
    if (idx.i == 0 || idx.i + 1 == g.dim(0)) continue;
    if (g.ndims() == 2 && (idx.j == 0 || idx.j + 1 == g.dim(1))) continue;
    if (dist[k] <= 10.0 * h) continue;
    const double f2 = f[k] * f[k];
    const double r =
        (grad.dx[k] * grad.dx[k] + grad.dy[k] * grad.dy[k] - hbar * lap[k] - f2) / f2;
    sum += r * r;
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sum / static_cast<double>(count));
}

io::KeyValues to_key_values(const SolveReport& r) {
  using io::format_double;
  io::KeyValues kv;
  kv.emplace_back("backend", r.backend);
  const GridSpec& g = r.S_star.grid();
  kv.emplace_back("grid.ndims", std::to_string(g.ndims()));
  for (int a = 0; a < g.ndims(); ++a) {
    kv.emplace_back("grid.dim" + std::to_string(a), std::to_string(g.dim(a)));
    kv.emplace_back("grid.origin" + std::to_string(a), format_double(g.origin(a)));
    kv.emplace_back("grid.spacing" + std::to_string(a), format_double(g.spacing(a)));
  }
  if (r.hbar > 0.0) kv.emplace_back("hbar", format_double(r.hbar));
  if (r.ftilde) kv.emplace_back("ftilde", format_double(*r.ftilde));
  if (r.c0_bound) kv.emplace_back("c0_bound", format_double(*r.c0_bound));
  if (!r.term_norms.empty()) {
    kv.emplace_back("terms", std::to_string(r.term_norms.size() - 1));
    for (std::size_t i = 0; i < r.term_norms.size(); ++i)
      kv.emplace_back("term_norm." + std::to_string(i), format_double(r.term_norms[i]));
  }
  if (r.iterations) kv.emplace_back("iterations", std::to_string(*r.iterations));
  if (r.linear_residual) kv.emplace_back("linear_residual", format_double(*r.linear_residual));
  kv.emplace_back("gauge_offset", format_double(r.gauge_offset));
  kv.emplace_back("viscosity_residual_rms", format_double(r.viscosity_residual_rms));
  kv.emplace_back("S_min", format_double(r.S_star.min()));
  kv.emplace_back("S_max", format_double(r.S_star.max()));
  kv.emplace_back("floored_nodes", std::to_string(r.floored.size()));
  for (std::size_t w = 0; w < r.warnings.size(); ++w)
    kv.emplace_back("warning." + std::to_string(w), r.warnings[w]);
  return kv;
}

}  // namespace eik
