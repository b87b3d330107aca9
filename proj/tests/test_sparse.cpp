#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "eik/fixtures.hpp"
#include "eik/perturb.hpp"
#include "eik/plan.hpp"
#include "eik/sparse.hpp"
#include "oracles.hpp"

using namespace eik;

TEST_SUITE("sparse") {

TEST_CASE("3x3 stencil arithmetic") {
  const GridSpec g = GridSpec::plane(3, 3, {0, 0}, {1, 1});
  const StencilSystem sys = assemble(ScalarField(g, 1.0), SourceSet({{1, 1}}), 1.0);
  const Eigen::MatrixXd A = oracle::dense(sys);
  CHECK(A(4, 4) == 5.0);
  CHECK(A(4, 1) == -1.0);
  CHECK(A(4, 3) == -1.0);
  CHECK(A(4, 5) == -1.0);
  CHECK(A(4, 7) == -1.0);
  CHECK(A(4, 0) == 0.0);
  CHECK(sys.rhs[4] == 1.0);
  CHECK(sys.rhs[0] == 0.0);
}

TEST_CASE("apply agrees with the dense matrix, which is symmetric") {
  std::mt19937 rng(1);
  const GridSpec g = GridSpec::plane(5, 4, {0, 0}, {0.2, 0.2});
  const StencilSystem sys =
      assemble(oracle::random_field(g, rng, 0.5, 2.0), SourceSet({{2, 2}}), 0.3);
  const Eigen::MatrixXd A = oracle::dense(sys);
  CHECK(A == A.transpose());
  const ScalarField x = oracle::random_field(g, rng, -1, 1);
  std::vector<double> y(g.size());
  sys.apply(x.values(), y);
  const Eigen::VectorXd ref =
      A * Eigen::Map<const Eigen::VectorXd>(x.values().data(), static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(y[k] == doctest::Approx(ref(static_cast<Eigen::Index>(k))));
}

TEST_CASE("assembled matrices are positive definite") {
  std::mt19937 rng(4);
  for (std::size_t n = 2; n <= 6; ++n)
    for (double hbar : {0.01, 0.3, 5.0}) {
      const GridSpec g = GridSpec::square(0, 1, 1.0 / static_cast<double>(n - 1));
      const StencilSystem sys =
          assemble(oracle::random_field(g, rng, 0.1, 3.0), SourceSet({{0, 0}}), hbar);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(oracle::dense(sys)).eigenvalues();
      CHECK(ev.minCoeff() > 0.0);
    }
}

TEST_CASE("unscaled form") {
  const GridSpec g = GridSpec::plane(3, 3, {0, 0}, {0.1, 0.1});
  const StencilSystem sys =
      assemble(ScalarField(g, 2.0), SourceSet({{0, 0}}), 0.5, StencilForm::unscaled);
  CHECK(sys.diag[4] == 6.0);
  CHECK(sys.link[0] == -1.0);
}

TEST_CASE("CG on a zero right-hand side") {
  const GridSpec g = GridSpec::square(0, 1, 0.25);
  StencilSystem sys = assemble(ScalarField(g, 1.0), SourceSet({{0, 0}}), 0.5);
  std::fill(sys.rhs.begin(), sys.rhs.end(), 0.0);
  const CgResult r = solve_cg(sys, 1e-12, 100);
  CHECK(r.iterations == 0);
  for (double v : r.phi.values()) CHECK(v == 0.0);
}

TEST_CASE("CG and LDLT match the dense LU oracle on 8x8") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const GridSpec g = GridSpec::square(0, 1, 1.0 / 7);
    const StencilSystem sys = assemble(oracle::random_field(g, rng, 0.2, 2.0),
                                       SourceSet({{1, 2}, {6, 5}}, {0.0, 0.1}), 0.1);
    const Eigen::VectorXd ref = oracle::dense_solve(sys);
    const CgResult cg = solve_cg(sys, 1e-13, 1000);
    const ScalarField direct = solve_direct(sys);
    const double scale = ref.norm();
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double r = ref(static_cast<Eigen::Index>(k));
      CHECK(std::abs(cg.phi[k] - r) <= 1e-8 * scale);
      CHECK(std::abs(direct[k] - r) <= 1e-12 * scale);
    }
    for (std::size_t i = 1; i < cg.residual_history.size(); ++i)
      CHECK(cg.residual_history[i] <= cg.residual_history[i - 1] * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("CG reports exhaustion") {
  const GridSpec g = GridSpec::square(0, 1, 1.0 / 31);
  const StencilSystem sys = assemble(ScalarField(g, 1.0), SourceSet({{5, 5}}), 0.2);
  CHECK_THROWS_AS(solve_cg(sys, 1e-14, 3), SolverError);
}

TEST_CASE("solutions are linear in the sources") {
  std::mt19937 rng(12);
  const GridSpec g = GridSpec::square(0, 1, 1.0 / 15);
  const ScalarField f = oracle::random_field(g, rng, 0.5, 1.5);
  const StencilSystem a = assemble(f, SourceSet({{3, 3}}), 0.1);
  const StencilSystem b = assemble(f, SourceSet({{10, 12}}), 0.1);
  const StencilSystem ab = assemble(f, SourceSet({{3, 3}, {10, 12}}), 0.1);
  const ScalarField pa = solve_direct(a), pb = solve_direct(b), pab = solve_direct(ab);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(pab[k] == doctest::Approx(pa[k] + pb[k]).epsilon(1e-12));
}

TEST_CASE("unit forcing approaches Euclidean distance") {
  const GridSpec g = GridSpec::square(-1, 1, 2.0 / 64);
  const SourceSet s = SourceSet::from_world(g, {{0.0, 0.0}});
  const SolveReport r = sparse_eikonal(ScalarField(g, 1.0), s, 0.05);
  CHECK(r.S_star.at(s.points()[0]) == doctest::Approx(0.0).epsilon(1e-12));
  const ScalarField d = oracle::euclid(g, s);
  std::vector<std::size_t> ring;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (d[k] >= 0.2 && d[k] <= 0.8) ring.push_back(k);
  const oracle::Aligned al = oracle::gauge_aligned(r.S_star, d, ring);
  CHECK(al.max_relative <= 0.10);
}

TEST_CASE("sparse and perturbation agree for unit forcing") {
  const GridSpec g = GridSpec::square(-1, 1, 2.0 / 64);
  const SourceSet s = SourceSet::from_world(g, {{0.0, 0.0}});
  const ScalarField f(g, 1.0);
  PerturbConfig cfg;
  cfg.hbar = 0.05;
  const SolveReport p = perturb_solve(f, s, cfg);
  const SolveReport q = sparse_eikonal(f, s, 0.05);
  CHECK(oracle::gauge_aligned(q.S_star, p.S_star, oracle::interior(g, s, 10)).l2_relative <= 0.05);
}

TEST_CASE("CG backend agrees with the direct backend where phi is resolved") {
  const GridSpec g = GridSpec::square(-1, 1, 2.0 / 32);
  const SourceSet s = SourceSet::from_world(g, {{0.0, 0.0}});
  SparseOptions opt;
  opt.solver = LinearSolver::cg;
  opt.tol = 1e-12;
  const SolveReport a = sparse_eikonal(ScalarField(g, 1.0), s, 0.2, opt);
  const SolveReport b = sparse_eikonal(ScalarField(g, 1.0), s, 0.2);
  REQUIRE(a.iterations);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.S_star[k] == doctest::Approx(b.S_star[k]).epsilon(1e-6));
}

TEST_CASE("refinement changes shrink") {
  std::vector<double> at;
  for (int n : {32, 64, 128, 256}) {
    const GridSpec g = GridSpec::square(-1, 1, 2.0 / n);
    const SolveReport r =
        sparse_eikonal(ScalarField(g, 1.0), SourceSet::from_world(g, {{0.0, 0.0}}), 0.05);
    at.push_back(interpolate(r.S_star, {0.5, 0.25}));
  }
  for (std::size_t i = 2; i < at.size(); ++i)
    CHECK(std::abs(at[i] - at[i - 1]) < std::abs(at[i - 1] - at[i - 2]));
}

TEST_CASE("maze walls sit above the corridor they bound") {
  const auto mz = fixtures::spiral_maze(160, 16, 8);
  const MazeCost cost = maze_to_forcing(mz.image);
  const SourceSet s({mz.source});
  const SolveReport r = sparse_eikonal(cost.field, s, mz.hbar);
  CHECK(r.floored.empty());
  const auto hops = oracle::pixel_bfs(mz.image, mz.source);
  for (std::size_t k = 0; k < hops.size(); ++k)
    if (hops[k] >= 0) CHECK(std::isfinite(r.S_star[k]));
  const PathPolyline p = backtrack(r.S_star, r.S_star.grid().world(mz.starts[0]), s);
  REQUIRE(p.status == PathStatus::reached_source);
  const GridSpec& g = r.S_star.grid();
  for (const auto& q : p.points) {
    const Index ix{static_cast<std::size_t>(std::lround(q[0])), static_cast<std::size_t>(std::lround(q[1]))};
    const long di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int n = 0; n < 4; ++n) {
      const long ni = static_cast<long>(ix.i) + di[n], nj = static_cast<long>(ix.j) + dj[n];
      if (ni < 0 || nj < 0 || ni >= static_cast<long>(g.dim(0)) || nj >= static_cast<long>(g.dim(1))) continue;
      const Index nb{static_cast<std::size_t>(ni), static_cast<std::size_t>(nj)};
      if (cost.field.at(nb) == cost.hi) CHECK(r.S_star.at(nb) > r.S_star.at(ix));
    }
  }
}

}  // TEST_SUITE
