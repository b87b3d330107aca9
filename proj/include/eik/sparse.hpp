#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "eik/field.hpp"
#include "eik/report.hpp"

namespace eik {

enum class StencilForm {
  /// (hbar^2 / delta^2) L5 + diag(f^2): the discretization of
  /// -hbar^2 lap(phi) + f^2 phi.
  consistent,
  /// L5 + diag(f), the block matrix exactly as commonly printed, without the
  /// hbar^2 / delta^2 scaling and with f unsquared.
  unscaled,
};

/// Five-point system A phi = b with zero-Dirichlet ghosts outside the grid.
/// Off-diagonal links are implicit: every pair of axis neighbours couples
/// with link[axis], so A is symmetric by construction.
struct StencilSystem {
  GridSpec grid;
  std::vector<double> diag;
  std::array<double, 2> link{0.0, 0.0};
  std::vector<double> rhs;

  /// y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
};

StencilSystem assemble(const ScalarField& f, const SourceSet& sources, double hbar,
                       StencilForm form = StencilForm::consistent);

/// Thrown when an iterative solve exhausts its iteration budget.
class SolverError : public Error {
 public:
  SolverError(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct CgResult {
  ScalarField phi;
  std::size_t iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b||
  std::vector<double> residual_history;  // one entry per iteration, starting at 1
};

/// Jacobi-preconditioned conjugate gradients to ||b - Ax|| / ||b|| <= tol.
CgResult solve_cg(const StencilSystem& sys, double tol, std::size_t max_iter);

/// Sparse LDL^T factorization. A is an M-matrix here, so the triangular
/// solves only add nonnegative terms and tiny entries of phi keep their
/// relative accuracy, which CG cannot offer far from the sources.
ScalarField solve_direct(const StencilSystem& sys);

enum class LinearSolver { direct, cg };

struct SparseOptions {
  double tol = 1e-10;
  std::size_t max_iter = 200000;
  LinearSolver solver = LinearSolver::direct;
  StencilForm form = StencilForm::consistent;
  /// Shift S* by a constant so that S*(y_k) = h_k on average over the seeds.
  bool anchor = true;
  double phi_floor = 1e-300;
};

SolveReport sparse_eikonal(const ScalarField& f, const SourceSet& sources, double hbar,
                           const SparseOptions& opt = {});

}  // namespace eik
