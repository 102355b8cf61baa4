#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "fsclf/fsclf.hpp"
#include "fsclf/ocp.hpp"
#include "fsclf/solver.hpp"
#include "fsclf/system.hpp"
#include "fsclf/trajectory.hpp"

namespace fsclf {

enum class Algorithm { MultiStep, ShrinkingUpdated, Classic };

enum class WarmStartPolicy { zeros, shift_previous };

/// What a driver does after the retry when a per-step problem stays
/// infeasible: halt raises OcpInfeasibleError with the step context;
/// continue_best applies the least-violation solution and records the event.
enum class InfeasibilityPolicy { halt, continue_best };

struct ClosedLoopConfig {
  Algorithm algorithm = Algorithm::MultiStep;
  /// M for the contractive algorithms, N for the classic one.
  int horizon = 1;
  int total_steps = 1;
  SolverConfig solver;
  WarmStartPolicy warm_start = WarmStartPolicy::shift_previous;
  /// Empty means the per-algorithm default: halt for MultiStep and Classic,
  /// continue_best for ShrinkingUpdated (whose within-cycle subproblems can
  /// lose feasibility under disturbance while the loop remains healthy).
  std::optional<InfeasibilityPolicy> on_infeasible;
};

/// Record of one optimizer call inside a closed-loop run.
struct SolveDiagnostic {
  int time_step = 0;
  int cycle = 0;
  int stage = 0;
  int horizon = 0;
  SolveStatus status = SolveStatus::max_iters;
  IterationCounts iterations;
  double contraction_residual = 0.0;
  double max_residual = 0.0;
  double wall_time_s = 0.0;
  /// Infinity norm between the state handed to the optimizer and the stored
  /// trajectory state at that time; zero by construction.
  double measured_state_gap = 0.0;
  bool retried = false;
  /// True when the step continued on a least-violation solution.
  bool infeasible_continued = false;
};

struct ClosedLoopResult {
  /// Trajectory of the true (possibly disturbed) system.
  Trajectory trajectory;
  ControlSequence applied_inputs;
  /// V(x(t)) for t = 0..T.
  std::vector<double> v_values;
  std::vector<SolveDiagnostic> diagnostics;
  /// V(x(kM)) recorded at each cycle start (contractive algorithms only).
  std::vector<double> cycle_anchors;
  /// Time steps whose input came from a least-violation solution.
  std::vector<int> infeasible_steps;
  /// Per time step t = 0..T-1: index into diagnostics of the solve that
  /// produced u(t), or -1 when the input was taken from an earlier solution.
  std::vector<int> solve_index_for_step;
};

/// Contractive multi-step driver: solves the full-horizon contractive
/// problem at the measured state every M steps and applies the whole input
/// sequence open loop (a truncated prefix on a final partial cycle).
ClosedLoopResult run_multistep(const ControlSystem& system_true,
                               const ControlSystem& system_nominal,
                               const FsCLF& fsclf,
                               const Eigen::VectorXd& initial_state, int T,
                               const ClosedLoopConfig& config);

/// Contractive shrinking-horizon driver: at cycle offset s it solves the
/// problem with M-s remaining steps, anchored at the V value recorded when
/// the cycle started, and applies only the first input.
ClosedLoopResult run_shrinking(const ControlSystem& system_true,
                               const ControlSystem& system_nominal,
                               const FsCLF& fsclf,
                               const Eigen::VectorXd& initial_state, int T,
                               const ClosedLoopConfig& config);

/// Classic fixed-horizon driver: solves the unconstrained-horizon problem at
/// every step and applies the first input; no contraction constraint.
ClosedLoopResult run_classic(const ControlSystem& system_true,
                             const ControlSystem& system_nominal,
                             const FsCLF& fsclf,
                             const Eigen::VectorXd& initial_state, int N, int T,
                             const ClosedLoopConfig& config);

/// Dispatches on config.algorithm using config.horizon and
/// config.total_steps.
ClosedLoopResult run_closed_loop(const ControlSystem& system_true,
                                 const ControlSystem& system_nominal,
                                 const FsCLF& fsclf,
                                 const Eigen::VectorXd& initial_state,
                                 const ClosedLoopConfig& config);

}  // namespace fsclf
