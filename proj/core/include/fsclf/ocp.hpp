#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "fsclf/errors.hpp"
#include "fsclf/fsclf.hpp"
#include "fsclf/solver.hpp"
#include "fsclf/system.hpp"
#include "fsclf/trajectory.hpp"

namespace fsclf {

/// Contractive problem over the full step count M: the terminal state must
/// satisfy V(x(M)) <= decay(V(initial_state)).
struct Contractive {
  int M = 1;
};

/// Shrinking-horizon problem with j remaining steps inside a cycle; the
/// terminal constraint V(x(j)) <= decay(anchor_value) is anchored at the V
/// value recorded when the cycle started, not at the current state.
struct Shrinking {
  int horizon = 1;
  double anchor_value = 0.0;
};

/// Fixed-horizon problem without a contraction constraint.
struct Classic {
  int N = 1;
};

/// One optimal control problem instance. Predictions always use the nominal
/// map; a disturbance attached to the system is ignored by the builders.
struct OcpSpec {
  std::variant<Contractive, Shrinking, Classic> variant;
  ControlSystem system;
  FsCLF fsclf;
  Eigen::VectorXd initial_state;
  int initial_time = 0;
};

struct OcpSolution {
  ControlSequence controls;
  Trajectory predicted;
  double cost = 0.0;
  /// max(0, V(x(H)) - decay(anchor)); 0 for the classic variant.
  double contraction_residual = 0.0;
  SolveStatus solver_status = SolveStatus::max_iters;
  IterationCounts iterations;
  double max_residual = 0.0;
};

/// Raised when no returned iterate meets the feasibility tolerance. Carries
/// the least-violation solution so callers can inspect or apply it.
class OcpInfeasibleError : public Error {
 public:
  OcpInfeasibleError(const std::string& message, OcpSolution best);
  const OcpSolution& best() const { return *best_; }

 private:
  std::shared_ptr<const OcpSolution> best_;
};

/// Single-shooting transcription of the contractive problem: decision vector
/// of M stacked inputs, cost sum of V over the first M predicted states,
/// contraction constraint anchored at V(initial_state), componentwise state
/// box constraints when the state set is a box, and input box bounds on the
/// decision vector. Throws ValidationError if the initial state is outside
/// the state set or the variant does not match.
NlpProblem build_ocp1(const OcpSpec& spec);

/// Same transcription with the given remaining horizon and the contraction
/// constraint anchored at decay(anchor_value).
NlpProblem build_ocp2(const OcpSpec& spec);

/// Fixed-horizon transcription without a contraction constraint.
NlpProblem build_ocp3(const OcpSpec& spec);

/// Builds the problem for the spec's variant, solves it from the warm start
/// (zeros when absent), and rolls out the returned controls on the nominal
/// map. Throws OcpInfeasibleError when the best iterate does not meet the
/// feasibility tolerance.
OcpSolution solve_ocp(const OcpSpec& spec, const SolverConfig& config,
                      const std::optional<ControlSequence>& warm_start =
                          std::nullopt);

/// Optimal value of the classic problem with horizon N; equals V(xi) for
/// N = 1 and is nondecreasing in N.
double optimal_value_VN(const ControlSystem& system, const FsCLF& fsclf,
                        const Eigen::VectorXd& xi, int N,
                        const SolverConfig& config);

}  // namespace fsclf
