#include "eik/sparse.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <numeric>

#include "eik/perturb.hpp"

namespace eik {

namespace {

double norm2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

void StencilSystem::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n0 = grid.dim(0), n1 = grid.dim(1);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t k = i * n1 + j;
      double s = diag[k] * x[k];
      if (i > 0) s += link[0] * x[k - n1];
      if (i + 1 < n0) s += link[0] * x[k + n1];
      if (j > 0) s += link[1] * x[k - 1];
      if (j + 1 < n1) s += link[1] * x[k + 1];
      y[k] = s;
    }
  }
}

StencilSystem assemble(const ScalarField& f, const SourceSet& sources, double hbar,
                       StencilForm form) {
  const GridSpec& g = f.grid();
  if (g.ndims() != 2) throw Error("assemble: the five-point system needs a 2D grid");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error("assemble: hbar must be positive");
  require_positive_forcing(f);
  sources.validate(g);

  StencilSystem sys;
  sys.grid = g;
  sys.diag.resize(g.size());
  if (form == StencilForm::consistent) {
    const double w0 = hbar * hbar / (g.spacing(0) * g.spacing(0));
    const double w1 = hbar * hbar / (g.spacing(1) * g.spacing(1));
    sys.link = {-w0, -w1};
    for (std::size_t k = 0; k < g.size(); ++k) sys.diag[k] = 2.0 * (w0 + w1) + f[k] * f[k];
  } else {
    sys.link = {-1.0, -1.0};
    for (std::size_t k = 0; k < g.size(); ++k) sys.diag[k] = 4.0 + f[k];
  }

  sys.rhs.assign(g.size(), 0.0);
  const double hmin = sources.min_value();
  for (std::size_t m = 0; m < sources.size(); ++m)
    sys.rhs[g.flat(sources.points()[m])] =
        std::exp(-(sources.boundary_values()[m] - hmin) / hbar);
  return sys;
}

CgResult solve_cg(const StencilSystem& sys, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error("solve_cg: tolerance must be positive");
  const std::size_t n = sys.grid.size();
  CgResult res;
  res.phi = ScalarField(sys.grid);
  const double bnorm = norm2(sys.rhs);
  if (bnorm == 0.0) return res;

  std::span<double> x = res.phi.values();
  std::vector<double> r(sys.rhs), z(n), p(n), q(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / sys.diag[k];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);

  double rel = 1.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    sys.apply(p, q);
    const double alpha = rz / std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    rel = norm2(r) / bnorm;
    res.residual_history.push_back(rel);
    if (rel <= tol) {
      res.iterations = it;
      res.residual = rel;
      return res;
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / sys.diag[k];
    const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw SolverError("solve_cg: no convergence after " + std::to_string(max_iter) +
                        " iterations (relative residual " + std::to_string(rel) + ")",
                    rel);
}

ScalarField solve_direct(const StencilSystem& sys) {
  const GridSpec& g = sys.grid;
  const std::size_t n0 = g.dim(0), n1 = g.dim(1);
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.size() * 5);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const auto k = static_cast<Eigen::Index>(i * n1 + j);
      entries.emplace_back(k, k, sys.diag[static_cast<std::size_t>(k)]);
      if (i + 1 < n0) {
        entries.emplace_back(k, k + static_cast<Eigen::Index>(n1), sys.link[0]);
        entries.emplace_back(k + static_cast<Eigen::Index>(n1), k, sys.link[0]);
      }
      if (j + 1 < n1) {
        entries.emplace_back(k, k + 1, sys.link[1]);
        entries.emplace_back(k + 1, k, sys.link[1]);
      }
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw Error("solve_direct: factorization failed");
  const Eigen::Map<const Eigen::VectorXd> b(sys.rhs.data(), n);
  const Eigen::VectorXd x = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success) throw Error("solve_direct: triangular solve failed");
  return ScalarField(g, std::vector<double>(x.data(), x.data() + n));
}

SolveReport sparse_eikonal(const ScalarField& f, const SourceSet& sources, double hbar,
                           const SparseOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const StencilSystem sys = assemble(f, sources, hbar, opt.form);

  SolveReport rep;
  rep.backend = "sparse";
  rep.hbar = hbar;
  ScalarField phi;
  if (opt.solver == LinearSolver::cg) {
    CgResult cg = solve_cg(sys, opt.tol, opt.max_iter);
    rep.iterations = cg.iterations;
    rep.linear_residual = cg.residual;
    phi = std::move(cg.phi);
  } else {
    phi = solve_direct(sys);
    std::vector<double> ax(sys.grid.size());
    sys.apply(phi.values(), ax);
    for (std::size_t k = 0; k < ax.size(); ++k) ax[k] -= sys.rhs[k];
    rep.linear_residual = norm2(ax) / norm2(sys.rhs);
  }

  std::size_t negative = 0;
  for (double v : phi.values()) negative += v < 0.0 ? 1 : 0;
  if (negative > 0)
    rep.warnings.push_back(std::to_string(negative) +
                           " negative phi values (tolerance too loose for the far field)");

  rep.S_star = log_transform(phi, hbar, opt.phi_floor, rep.floored);
  if (!rep.floored.empty())
    rep.warnings.push_back(std::to_string(rep.floored.size()) +
                           " nodes clamped at the positivity floor");
  if (opt.anchor) {
    double shift = 0.0;
    for (std::size_t m = 0; m < sources.size(); ++m)
      shift += rep.S_star.at(sources.points()[m]) - sources.boundary_values()[m];
    shift /= static_cast<double>(sources.size());
    for (double& v : rep.S_star.values()) v -= shift;
    rep.gauge_offset = shift;
  }
  rep.phi = std::move(phi);
  rep.viscosity_residual_rms = viscosity_residual_rms(rep.S_star, f, hbar, sources);
  rep.wall_time = std::chrono::steady_clock::now() - t0;
  return rep;
}

}  // namespace eik
