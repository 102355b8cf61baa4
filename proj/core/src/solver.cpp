#include "fsclf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsclf/errors.hpp"

namespace fsclf {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr double kPenaltyCeiling = 1e14;

Eigen::VectorXd gradient_of(const SmoothFunction& f, const Eigen::VectorXd& x,
                            double fd_step) {
  if (f.gradient) return f.gradient(x);
  return finite_diff_gradient(f.value, x, fd_step);
}

struct Augmented {
  const NlpProblem* problem;
  const SolverConfig* config;
  Eigen::VectorXd lambda;
  double rho;

  double value(const Eigen::VectorXd& x) const {
    double v = problem->cost.value(x);
    for (size_t i = 0; i < problem->inequality_constraints.size(); ++i) {
      const double g = problem->inequality_constraints[i].value(x);
      const double t = std::max(0.0, lambda(i) / rho + g);
      v += 0.5 * rho * t * t - lambda(i) * lambda(i) / (2.0 * rho);
    }
    return v;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd grad = gradient_of(problem->cost, x, config->fd_step);
    for (size_t i = 0; i < problem->inequality_constraints.size(); ++i) {
      const auto& con = problem->inequality_constraints[i];
      const double g = con.value(x);
      const double t = std::max(0.0, lambda(i) / rho + g);
      if (t > 0.0) grad += rho * t * gradient_of(con, x, config->fd_step);
    }
    return grad;
  }
};

Eigen::VectorXd project_box(const NlpProblem& problem,
                            const Eigen::VectorXd& x) {
  if (!problem.box) return x;
  return problem.box->project(x);
}

double projected_gradient_norm(const NlpProblem& problem,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& grad) {
  return (x - project_box(problem, x - grad)).lpNorm<Eigen::Infinity>();
}

// Minimizes the augmented Lagrangian from x with projected BFGS and Armijo
// backtracking. Returns the number of inner iterations used.
int inner_minimize(const NlpProblem& problem, const SolverConfig& config,
                   const Augmented& aug, Eigen::VectorXd& x, double tol) {
  const int n = problem.dim;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd grad = aug.gradient(x);
  double fx = aug.value(x);
  int iters = 0;

  for (; iters < config.max_inner_iters; ++iters) {
    if (projected_gradient_norm(problem, x, grad) <= tol) break;

    Eigen::VectorXd d = -(H * grad);
    if (problem.box) {
      // Block directions that push an active coordinate further out of range.
      for (int i = 0; i < n; ++i) {
        const bool at_lower = x(i) <= problem.box->lower()(i) && d(i) < 0.0;
        const bool at_upper = x(i) >= problem.box->upper()(i) && d(i) > 0.0;
        if (at_lower || at_upper) d(i) = 0.0;
      }
    }
    if (d.dot(grad) >= 0.0) {
      H.setIdentity();
      d = -grad;
      if (problem.box) {
        for (int i = 0; i < n; ++i) {
          const bool at_lower = x(i) <= problem.box->lower()(i) && d(i) < 0.0;
          const bool at_upper = x(i) >= problem.box->upper()(i) && d(i) > 0.0;
          if (at_lower || at_upper) d(i) = 0.0;
        }
      }
      if (d.squaredNorm() == 0.0) break;
    }

    double step = 1.0;
    Eigen::VectorXd x_next;
    double f_next = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      x_next = project_box(problem, x + step * d);
      f_next = aug.value(x_next);
      const double predicted = grad.dot(x_next - x);
      if (std::isfinite(f_next) && f_next <= fx + kArmijoSlope * predicted &&
          predicted < 0.0) {
        accepted = true;
        break;
      }
      step *= kBacktrackFactor;
    }
    if (!accepted) break;

    Eigen::VectorXd grad_next = aug.gradient(x_next);
    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double inv_sy = 1.0 / sy;
      const Eigen::VectorXd Hy = H * y;
      H += (s * s.transpose()) * ((sy + y.dot(Hy)) * inv_sy * inv_sy) -
           (Hy * s.transpose() + s * Hy.transpose()) * inv_sy;
    }
    x = std::move(x_next);
    fx = f_next;
    grad = std::move(grad_next);
  }
  return iters;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::feasible_suboptimal:
      return "feasible_suboptimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::max_iters:
      return "max_iters";
  }
  return "unknown";
}

Eigen::VectorXd finite_diff_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double fd_step) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = fd_step * (1.0 + std::abs(x(i)));
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NonFiniteError("non-finite function value in finite differences");
    }
    grad(i) = (fp - fm) / (2.0 * h);
  }
  return grad;
}

SolverResult solve(const NlpProblem& problem, const SolverConfig& config,
                   const Eigen::VectorXd& initial_guess) {
  if (initial_guess.size() != problem.dim) {
    throw DimensionError("initial guess dimension does not match problem");
  }
  const int n_con = static_cast<int>(problem.inequality_constraints.size());

  Eigen::VectorXd x = project_box(problem, initial_guess);
  if (!std::isfinite(problem.cost.value(x))) {
    throw NonFiniteError("cost is not finite at the initial guess");
  }

  auto residuals_at = [&](const Eigen::VectorXd& z) {
    std::vector<double> r(n_con);
    for (int i = 0; i < n_con; ++i) {
      r[i] = std::max(0.0, problem.inequality_constraints[i].value(z));
    }
    return r;
  };
  auto max_of = [](const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, v);
    return m;
  };

  Augmented aug{&problem, &config, Eigen::VectorXd::Zero(n_con),
                config.initial_penalty};

  SolverResult result;
  result.trace.reserve(config.collect_trace ? config.max_outer_iters : 0);

  // Best feasible iterate seen so far; seeded with the guess when feasible
  // so the returned cost can never regress below the starting point. A
  // tolerance-feasible incumbent undercuts the true optimum by about
  // lambda' * violations, so challengers are granted that credit: without
  // it the first barely-feasible iterate would shadow the converged one,
  // whose cost approaches the optimum from below as the violation shrinks.
  bool have_feasible = false;
  Eigen::VectorXd best_x = x;
  double best_cost = 0.0;
  double best_stationarity = std::numeric_limits<double>::infinity();
  std::vector<double> best_residuals;
  const auto violation_credit = [&aug](const std::vector<double>& r) {
    double credit = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      credit += aug.lambda(static_cast<int>(i)) * r[i];
    }
    return credit;
  };
  {
    const auto r0 = residuals_at(x);
    if (max_of(r0) <= config.feasibility_tol) {
      have_feasible = true;
      best_x = x;
      best_cost = problem.cost.value(x);
      best_residuals = r0;
    }
  }

  Eigen::VectorXd accepted_x = x;
  double accepted_residual = std::numeric_limits<double>::infinity();
  double prev_accepted_residual = std::numeric_limits<double>::infinity();
  bool optimal = false;

  int outer = 0;
  for (; outer < config.max_outer_iters && !optimal; ++outer) {
    Eigen::VectorXd trial = accepted_x;
    result.iterations.inner_total +=
        inner_minimize(problem, config, aug, trial, config.optimality_tol);

    const auto trial_residuals = residuals_at(trial);
    const double trial_max = max_of(trial_residuals);

    if (trial_max <= accepted_residual + 1e-15) {
      prev_accepted_residual = accepted_residual;
      accepted_x = trial;
      accepted_residual = trial_max;

      // Multiplier update on the accepted iterate.
      for (int i = 0; i < n_con; ++i) {
        const double g = problem.inequality_constraints[i].value(accepted_x);
        aug.lambda(i) = std::max(0.0, aug.lambda(i) + aug.rho * g);
      }

      const double cost_here = problem.cost.value(accepted_x);
      const double stat_here =
          projected_gradient_norm(problem, accepted_x, aug.gradient(accepted_x));
      if (config.collect_trace) {
        result.trace.push_back(
            {outer + 1, cost_here, accepted_residual, stat_here, aug.rho});
      }
      if (accepted_residual <= config.feasibility_tol) {
        if (!have_feasible ||
            cost_here <= best_cost + violation_credit(best_residuals)) {
          have_feasible = true;
          best_x = accepted_x;
          best_cost = cost_here;
          best_stationarity = stat_here;
          best_residuals = trial_residuals;
        }
        if (stat_here <= config.optimality_tol) optimal = true;
      } else if (trial_max > 0.25 * prev_accepted_residual) {
        // Feasibility progress stalled; stiffen the penalty.
        aug.rho *= config.penalty_growth;
      }
    } else {
      // Residual regressed; discard the trial and stiffen the penalty.
      if (config.collect_trace) {
        const double cost_here = problem.cost.value(accepted_x);
        result.trace.push_back({outer + 1, cost_here, accepted_residual,
                                result.trace.empty()
                                    ? 0.0
                                    : result.trace.back().stationarity,
                                aug.rho});
      }
      aug.rho *= config.penalty_growth;
    }
    if (aug.rho > kPenaltyCeiling &&
        accepted_residual > config.feasibility_tol) {
      break;  // penalty exhausted, the constraint system looks infeasible
    }
  }
  result.iterations.outer = outer;

  if (have_feasible) {
    result.solution = best_x;
    result.cost_value = best_cost;
    result.status = best_stationarity <= config.optimality_tol
                        ? SolveStatus::optimal
                        : SolveStatus::feasible_suboptimal;
  } else {
    result.solution = accepted_x;
    result.cost_value = problem.cost.value(accepted_x);
    result.status = aug.rho > kPenaltyCeiling ? SolveStatus::infeasible
                                              : SolveStatus::max_iters;
    if (outer >= config.max_outer_iters) {
      // Out of iterations; call it infeasible only if the residual stopped
      // moving, otherwise report the budget as the limiting factor.
      const bool stalled =
          std::isfinite(prev_accepted_residual) &&
          prev_accepted_residual - accepted_residual <= 1e-12;
      result.status =
          stalled ? SolveStatus::infeasible : SolveStatus::max_iters;
    }
  }
  result.constraint_residuals = residuals_at(result.solution);
  result.max_residual = max_of(result.constraint_residuals);
  result.stationarity = projected_gradient_norm(
      problem, result.solution, aug.gradient(result.solution));
  return result;
}

}  // namespace fsclf
