#include "fsclf/mpc.hpp"

#include <chrono>
#include <string>
#include <utility>

namespace fsclf {

namespace {

using Clock = std::chrono::steady_clock;

InfeasibilityPolicy effective_policy(const ClosedLoopConfig& config,
                                     Algorithm algorithm) {
  if (config.on_infeasible) return *config.on_infeasible;
  return algorithm == Algorithm::ShrinkingUpdated
             ? InfeasibilityPolicy::continue_best
             : InfeasibilityPolicy::halt;
}

void validate_common(const ControlSystem& system_true,
                     const ControlSystem& system_nominal, const FsCLF& fsclf,
                     const Eigen::VectorXd& initial_state, int T) {
  if (T < 1) throw ValidationError("total steps must be >= 1");
  if (system_true.state_dim != system_nominal.state_dim ||
      system_true.input_dim != system_nominal.input_dim) {
    throw DimensionError("true and nominal system dimensions differ");
  }
  if (fsclf.state_dim != system_true.state_dim) {
    throw DimensionError("fs-CLF dimension does not match the system");
  }
  if (initial_state.size() != system_true.state_dim) {
    throw DimensionError("initial state dimension does not match the system");
  }
}

// Solves one subproblem with a single stiffer-penalty retry. When the retry
// also fails: halt rethrows with step context, continue_best returns the
// least-violation solution.
OcpSolution solve_step(const OcpSpec& spec, const SolverConfig& solver_config,
                       const std::optional<ControlSequence>& warm,
                       InfeasibilityPolicy policy, int cycle, int stage,
                       SolveDiagnostic& diag) {
  const auto t0 = Clock::now();
  auto finish = [&](OcpSolution sol) {
    diag.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    diag.status = sol.solver_status;
    diag.iterations = sol.iterations;
    diag.contraction_residual = sol.contraction_residual;
    diag.max_residual = sol.max_residual;
    return sol;
  };

  try {
    return finish(solve_ocp(spec, solver_config, warm));
  } catch (const OcpInfeasibleError& first) {
    diag.retried = true;
    SolverConfig retry = solver_config;
    retry.initial_penalty = solver_config.initial_penalty * 1e3;
    ControlSequence restart = first.best().controls;
    try {
      return finish(solve_ocp(spec, retry, restart));
    } catch (const OcpInfeasibleError& second) {
      if (policy == InfeasibilityPolicy::halt) {
        throw OcpInfeasibleError(
            "subproblem infeasible at cycle " + std::to_string(cycle) +
                ", stage " + std::to_string(stage) + ", best residual " +
                std::to_string(second.best().max_residual),
            second.best());
      }
      diag.infeasible_continued = true;
      return finish(second.best());
    }
  }
}

void append_step(ClosedLoopResult& result, const ControlSystem& system_true,
                 const FsCLF& fsclf, const Eigen::VectorXd& u, int t) {
  Eigen::VectorXd next =
      system_true.transition(result.trajectory.states.back(), u, t);
  if (!next.allFinite()) {
    throw NonFiniteError("closed-loop state became non-finite at step " +
                         std::to_string(t + 1));
  }
  result.trajectory.inputs.push_back(u);
  result.applied_inputs.inputs.push_back(u);
  result.trajectory.states.push_back(std::move(next));
  result.v_values.push_back(eval_V(fsclf, result.trajectory.states.back()));
}

ClosedLoopResult init_result(const FsCLF& fsclf,
                             const Eigen::VectorXd& initial_state, int T) {
  ClosedLoopResult result;
  result.trajectory.start_time = 0;
  result.trajectory.states.reserve(T + 1);
  result.trajectory.states.push_back(initial_state);
  result.v_values.reserve(T + 1);
  result.v_values.push_back(eval_V(fsclf, initial_state));
  result.solve_index_for_step.assign(T, -1);
  return result;
}

}  // namespace

ClosedLoopResult run_multistep(const ControlSystem& system_true,
                               const ControlSystem& system_nominal,
                               const FsCLF& fsclf,
                               const Eigen::VectorXd& initial_state, int T,
                               const ClosedLoopConfig& config) {
  validate_common(system_true, system_nominal, fsclf, initial_state, T);
  const int M = fsclf.M;
  const auto policy = effective_policy(config, Algorithm::MultiStep);

  ClosedLoopResult result = init_result(fsclf, initial_state, T);
  std::optional<ControlSequence> previous;

  for (int t = 0; t < T; t += M) {
    const int cycle = t / M;
    const Eigen::VectorXd x = result.trajectory.states.back();
    result.cycle_anchors.push_back(eval_V(fsclf, x));

    SolveDiagnostic diag;
    diag.time_step = t;
    diag.cycle = cycle;
    diag.stage = 0;
    diag.horizon = M;
    OcpSpec spec{Contractive{M}, system_nominal, fsclf, x, t};
    diag.measured_state_gap =
        (spec.initial_state - result.trajectory.states.back())
            .lpNorm<Eigen::Infinity>();
    const std::optional<ControlSequence> warm =
        config.warm_start == WarmStartPolicy::shift_previous ? previous
                                                             : std::nullopt;
    OcpSolution sol =
        solve_step(spec, config.solver, warm, policy, cycle, 0, diag);
    result.diagnostics.push_back(diag);
    result.solve_index_for_step[t] =
        static_cast<int>(result.diagnostics.size()) - 1;

    const int applied = std::min(M, T - t);
    for (int i = 0; i < applied; ++i) {
      if (diag.infeasible_continued) result.infeasible_steps.push_back(t + i);
      append_step(result, system_true, fsclf, sol.controls.inputs[i], t + i);
    }
    previous = std::move(sol.controls);
  }
  return result;
}

ClosedLoopResult run_shrinking(const ControlSystem& system_true,
                               const ControlSystem& system_nominal,
                               const FsCLF& fsclf,
                               const Eigen::VectorXd& initial_state, int T,
                               const ClosedLoopConfig& config) {
  validate_common(system_true, system_nominal, fsclf, initial_state, T);
  const int M = fsclf.M;
  const auto policy = effective_policy(config, Algorithm::ShrinkingUpdated);

  ClosedLoopResult result = init_result(fsclf, initial_state, T);
  std::optional<ControlSequence> previous;
  std::optional<ControlSequence> previous_cycle;
  double anchor = 0.0;

  for (int t = 0; t < T; ++t) {
    const int cycle = t / M;
    const int stage = t % M;
    const int horizon = M - stage;
    const Eigen::VectorXd x = result.trajectory.states.back();

    OcpSpec spec{Contractive{M}, system_nominal, fsclf, x, t};
    if (stage == 0) {
      anchor = eval_V(fsclf, x);
      result.cycle_anchors.push_back(anchor);
    } else {
      spec.variant = Shrinking{horizon, anchor};
    }

    SolveDiagnostic diag;
    diag.time_step = t;
    diag.cycle = cycle;
    diag.stage = stage;
    diag.horizon = horizon;
    diag.measured_state_gap =
        (spec.initial_state - result.trajectory.states.back())
            .lpNorm<Eigen::Infinity>();

    // Within a cycle the previous solution's tail is both feasible for the
    // shrunk problem on the nominal system and the natural warm start. A
    // cycle start reuses the previous cycle's full solution, mirroring the
    // multi-step driver so the two coincide without disturbance.
    std::optional<ControlSequence> warm;
    if (config.warm_start == WarmStartPolicy::shift_previous) {
      if (stage == 0) {
        warm = previous_cycle;
      } else if (previous && previous->length() == horizon + 1) {
        ControlSequence tail;
        tail.inputs.assign(previous->inputs.begin() + 1,
                           previous->inputs.end());
        warm = std::move(tail);
      }
    }

    OcpSolution sol =
        solve_step(spec, config.solver, warm, policy, cycle, stage, diag);
    result.diagnostics.push_back(diag);
    if (diag.infeasible_continued) result.infeasible_steps.push_back(t);
    result.solve_index_for_step[t] =
        static_cast<int>(result.diagnostics.size()) - 1;

    append_step(result, system_true, fsclf, sol.controls.inputs.front(), t);
    if (stage == 0) previous_cycle = sol.controls;
    previous = std::move(sol.controls);
  }
  return result;
}

ClosedLoopResult run_classic(const ControlSystem& system_true,
                             const ControlSystem& system_nominal,
                             const FsCLF& fsclf,
                             const Eigen::VectorXd& initial_state, int N, int T,
                             const ClosedLoopConfig& config) {
  validate_common(system_true, system_nominal, fsclf, initial_state, T);
  if (N < 1) throw ValidationError("classic horizon must be >= 1");
  const auto policy = effective_policy(config, Algorithm::Classic);

  ClosedLoopResult result = init_result(fsclf, initial_state, T);
  std::optional<ControlSequence> previous;
  const Eigen::VectorXd zero_input =
      Eigen::VectorXd::Zero(system_true.input_dim);

  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd x = result.trajectory.states.back();
    SolveDiagnostic diag;
    diag.time_step = t;
    diag.cycle = t;
    diag.stage = 0;
    diag.horizon = N;
    OcpSpec spec{Classic{N}, system_nominal, fsclf, x, t};
    diag.measured_state_gap =
        (spec.initial_state - result.trajectory.states.back())
            .lpNorm<Eigen::Infinity>();

    std::optional<ControlSequence> warm;
    if (config.warm_start == WarmStartPolicy::shift_previous && previous) {
      ControlSequence shifted;
      shifted.inputs.assign(previous->inputs.begin() + 1,
                            previous->inputs.end());
      shifted.inputs.push_back(zero_input);
      warm = std::move(shifted);
    }

    OcpSolution sol = solve_step(spec, config.solver, warm, policy, t, 0, diag);
    result.diagnostics.push_back(diag);
    if (diag.infeasible_continued) result.infeasible_steps.push_back(t);
    result.solve_index_for_step[t] =
        static_cast<int>(result.diagnostics.size()) - 1;

    append_step(result, system_true, fsclf, sol.controls.inputs.front(), t);
    previous = std::move(sol.controls);
  }
  return result;
}

ClosedLoopResult run_closed_loop(const ControlSystem& system_true,
                                 const ControlSystem& system_nominal,
                                 const FsCLF& fsclf,
                                 const Eigen::VectorXd& initial_state,
                                 const ClosedLoopConfig& config) {
  switch (config.algorithm) {
    case Algorithm::MultiStep:
      if (config.horizon != fsclf.M) {
        throw ValidationError(
            "multi-step horizon must equal the fs-CLF step count");
      }
      return run_multistep(system_true, system_nominal, fsclf, initial_state,
                           config.total_steps, config);
    case Algorithm::ShrinkingUpdated:
      if (config.horizon != fsclf.M) {
        throw ValidationError(
            "shrinking horizon must equal the fs-CLF step count");
      }
      return run_shrinking(system_true, system_nominal, fsclf, initial_state,
                           config.total_steps, config);
    case Algorithm::Classic:
      return run_classic(system_true, system_nominal, fsclf, initial_state,
                         config.horizon, config.total_steps, config);
  }
  throw ValidationError("unknown algorithm");
}

}  // namespace fsclf
