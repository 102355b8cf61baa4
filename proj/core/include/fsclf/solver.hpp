#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "fsclf/constraint_set.hpp"

namespace fsclf {

/// Smooth scalar function of the decision vector with an optional analytic
/// gradient; finite differences are used when the gradient is absent.
struct SmoothFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

/// Constrained nonlinear program
///   minimize cost(z) subject to g_i(z) <= 0 and box bounds on z.
struct NlpProblem {
  int dim = 0;
  SmoothFunction cost;
  std::vector<SmoothFunction> inequality_constraints;
  std::optional<ConstraintSet> box;
};

struct SolverConfig {
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-8;
  int max_outer_iters = 50;
  int max_inner_iters = 200;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  /// Relative step for central finite differences.
  double fd_step = 1e-6;
  bool collect_trace = true;
};

enum class SolveStatus { optimal, feasible_suboptimal, infeasible, max_iters };

const char* to_string(SolveStatus status);

/// One accepted outer iterate of the augmented-Lagrangian loop.
struct IterationRecord {
  int outer = 0;
  double cost = 0.0;
  double max_residual = 0.0;
  double stationarity = 0.0;
  double penalty = 0.0;
};

struct IterationCounts {
  int outer = 0;
  int inner_total = 0;
};

struct SolverResult {
  Eigen::VectorXd solution;
  double cost_value = 0.0;
  /// max(0, g_i(solution)) per constraint.
  std::vector<double> constraint_residuals;
  double max_residual = 0.0;
  /// Projected-gradient stationarity measure at the solution.
  double stationarity = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  IterationCounts iterations;
  std::vector<IterationRecord> trace;
};

/// Solves the program with an augmented-Lagrangian outer loop around a
/// projected BFGS inner descent with Armijo backtracking. The returned
/// solution always satisfies the box bounds exactly; if the initial guess is
/// feasible, the returned cost is no worse than the guess cost plus
/// optimality_tol. Throws NonFiniteError if the cost is not finite at the
/// (projected) guess.
SolverResult solve(const NlpProblem& problem, const SolverConfig& config,
                   const Eigen::VectorXd& initial_guess);

/// Central finite differences with per-coordinate step fd_step*(1+|x_i|).
/// Throws NonFiniteError on a non-finite evaluation.
Eigen::VectorXd finite_diff_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double fd_step);

}  // namespace fsclf
