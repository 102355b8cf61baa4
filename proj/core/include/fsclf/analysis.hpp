#pragma once

#include <Eigen/Core>
#include <vector>

#include "fsclf/fsclf.hpp"
#include "fsclf/mpc.hpp"
#include "fsclf/solver.hpp"
#include "fsclf/system.hpp"
#include "fsclf/trajectory.hpp"

namespace fsclf {

struct SampleCertification {
  int index = 0;
  bool feasible = false;
  /// Achieved V(x(M)) / V(sample) of the returned solution.
  double ratio = 0.0;
  double residual = 0.0;
};

/// Outcome of sampling-based decay certification. Aggregate ratios are taken
/// over the feasible samples; both are 0 when no sample is feasible.
struct CertificationReport {
  int samples_tested = 0;
  int feasible_count = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double worst_residual = 0.0;
  /// All samples feasible and every achieved ratio below 1 - 1e-3.
  bool certified = false;
  std::vector<SampleCertification> samples;
};

/// Constants feeding the horizon bound: contraction factor c in [0,1),
/// transient growth factor d > 0, step count M.
struct HorizonBoundInputs {
  double c = 0.0;
  double d = 0.0;
  int M = 1;

  /// gamma = M d / (1 - c); throws ValidationError when out of range.
  double gamma() const;
};

struct ConverseDecayReport {
  /// Max over usable cycles of omega(x(kM+M)) / omega(x(kM)).
  double lambda_hat = 0.0;
  bool satisfied = false;
  int cycles_used = 0;
  /// True when every cycle start sits below the measurement floor 1e-12.
  bool vacuous = false;
};

struct TransientConstants {
  double c = 0.0;
  double d = 0.0;
};

struct EnvelopeFit {
  double C = 1.0;
  double sigma = 0.0;
  /// True when sigma < 1, i.e. the envelope certifies exponential decay.
  bool exponential = false;
};

/// Solves the contractive problem from every sample and reports feasibility
/// and the achieved terminal ratio; solver failures are recorded per sample,
/// not raised. A sample with V = 0 is feasible with ratio 0 by convention.
CertificationReport certify_fsclf(const ControlSystem& system,
                                  const FsCLF& fsclf,
                                  const std::vector<Eigen::VectorXd>& samples,
                                  const SolverConfig& config);

/// Deterministic sample states on the V = 1 level set. Dimension 3 uses a
/// Fibonacci-sphere point set rotated by the seed; other dimensions use a
/// seeded direction generator. Directions along which V vanishes stay at
/// unit norm.
std::vector<Eigen::VectorXd> level_set_samples(const FsCLF& fsclf, int count,
                                               int seed = 0);

/// Checks that the measurement functional contracts after every M steps of
/// the given closed loop, skipping cycles whose start measurement is below
/// 1e-12. Throws ValidationError when the trajectory is shorter than M.
ConverseDecayReport converse_decay_check(const ClosedLoopResult& closed_loop,
                                         const MeasurementFunction& omega,
                                         int M);

/// Smallest integer horizon strictly above 2 + ln(g-1)/(ln g - ln(g-1)) for
/// g > 1; returns 1 for g <= 1 where the bound degenerates. Throws
/// ValidationError for g <= 0.
int horizon_bound(double gamma);

/// Worst-case contraction factor c and transient growth factor d over the
/// optimal trajectories of the contractive problem from the given samples.
/// Throws ValidationError if any sample is infeasible or sits on the zero
/// set of V (the constants are undefined there).
TransientConstants fit_transient_constants(
    const ControlSystem& system, const FsCLF& fsclf,
    const std::vector<Eigen::VectorXd>& samples, const SolverConfig& config);

/// Max |x_component(t)| over t in [window_start, T] (component is 0-based).
double max_deviation_post_transient(const Trajectory& traj, int component,
                                    int window_start);

/// Tight exponential upper envelope omega(x(t)) <= C * sigma^t * omega(x(0))
/// fitted on the upper convex hull of the log series. When omega hits zero
/// exactly the fit uses the nonzero prefix. Requires omega(x(0)) > 0.
EnvelopeFit fit_exponential_envelope(const Trajectory& traj,
                                     const MeasurementFunction& omega);

}  // namespace fsclf
