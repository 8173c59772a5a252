#pragma once

#include <span>
#include <vector>

#include "hardylab/assembly.hpp"
#include "hardylab/geometry.hpp"

namespace hardylab {

enum class InnerSolver { Cholesky, JacobiPcg };

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 400;
  InnerSolver inner = InnerSolver::Cholesky;
  int pcg_max_iters = 50000;
  double pcg_tol = 1e-13;
};

struct EigenResult {
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<double> vector;  // B-normalized
  double residual = 0.0;       // ||K u - mu B u|| in the B^-1 norm
  int iterations = 0;
  int factorizations = 0;
  bool converged = false;
};

/// Smallest eigenvalue of K u = mu B u on a shared pattern. K - sigma_safe B must be
/// positive definite. Shift-and-invert in the B inner product; NotConverged is
/// reported through the flag, the best iterate is returned.
EigenResult solve_pencil(const SparsityPattern& pattern, std::span<const double> K,
                         std::span<const double> B, double sigma_safe, const SolverOptions& opt,
                         std::span<const double> start = {});

/// mu_lambda of (A_b - lambda M_eta, M_q).
EigenResult solve_mu(const QuadraticForms& forms, double lambda, const SolverOptions& opt = {},
                     std::span<const double> start = {});

/// Ascending lambdas, warm-started from the previous eigenvector.
std::vector<EigenResult> sweep(const QuadraticForms& forms, const std::vector<double>& lambdas,
                               const SolverOptions& opt = {});

/// c_h = min (A_b - C M_q)[u] / M_log[u] over u vanishing on rho >= R.
/// The returned vector lives on all dofs (zeros on the outer ring).
EigenResult local_hardy_remainder(const QuadraticForms& forms, const GeometryConfig& cfg,
                                  const SolverOptions& opt = {});

}  // namespace hardylab
