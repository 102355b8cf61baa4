#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fsclf/fsclf.hpp"
#include "fsclf/mpc.hpp"
#include "fsclf/solver.hpp"
#include "fsclf/system.hpp"

namespace fsclf::cli {

struct DisturbanceConfig {
  double amplitude = 0.0;
  double frequency = 0.0;
  std::vector<int> components;

  bool operator==(const DisturbanceConfig&) const = default;
};

struct VariantConfig {
  Algorithm algorithm = Algorithm::MultiStep;
  int horizon = 1;

  bool operator==(const VariantConfig&) const = default;
};

/// Optional overrides on top of the solver defaults.
struct SolverOverrides {
  std::optional<double> feasibility_tol;
  std::optional<double> optimality_tol;
  std::optional<int> max_outer_iters;
  std::optional<int> max_inner_iters;
  std::optional<double> initial_penalty;
  std::optional<double> fd_step;

  bool operator==(const SolverOverrides&) const = default;
};

/// Fully resolved experiment description. Builtin names expand to concrete
/// matrices at parse time, so a config always serializes in explicit form
/// and round-trips field by field.
struct ScenarioConfig {
  std::string name = "custom";

  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::optional<DisturbanceConfig> disturbance;

  /// False: V(x) = x' P x. True: V is the Euclidean norm taken as its own
  /// certificate (the converse construction); P is ignored.
  bool omega_passthrough = false;
  Eigen::MatrixXd P;
  double decay_c = 0.9;
  int M = 1;

  Algorithm algorithm = Algorithm::MultiStep;
  int horizon = 1;
  /// Variant list for the compare command; unused by run.
  std::vector<VariantConfig> variants;

  Eigen::VectorXd initial_state;
  int total_steps = 100;
  int window_start = 0;

  SolverOverrides solver;
  std::optional<WarmStartPolicy> warm_start;
  std::optional<InfeasibilityPolicy> on_infeasible;

  int seed = 0;
  int samples = 64;
  std::optional<std::string> output_directory;

  bool operator==(const ScenarioConfig& other) const;
};

/// Parses and validates a config document. Throws ValidationError with the
/// offending field path on any schema or consistency problem.
ScenarioConfig parse_scenario(const std::string& text);

/// Reads the file at the given path, or resolves a builtin name when no such
/// file exists. Throws IoError for unreadable paths that are not builtins.
ScenarioConfig load_scenario(const std::string& path_or_builtin);

/// Canonical JSON form; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

/// "paper-nominal" or "paper-perturbed"; throws ValidationError otherwise.
ScenarioConfig builtin_scenario(const std::string& name);

const char* algorithm_token(Algorithm algorithm);
Algorithm parse_algorithm_token(const std::string& token);

ControlSystem make_true_system(const ScenarioConfig& config);
ControlSystem make_nominal_system(const ScenarioConfig& config);
FsCLF make_fsclf(const ScenarioConfig& config);
SolverConfig make_solver_config(const ScenarioConfig& config,
                                std::optional<double> tol_override);
ClosedLoopConfig make_closed_loop_config(const ScenarioConfig& config,
                                         const VariantConfig& variant,
                                         const SolverConfig& solver);

}  // namespace fsclf::cli
