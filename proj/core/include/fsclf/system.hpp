#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "fsclf/constraint_set.hpp"

namespace fsclf {

/// Additive sinusoidal disturbance amplitude*sin(frequency*t) injected into
/// selected state components, where t is the absolute discrete time at which
/// the transition is applied.
struct DisturbanceSpec {
  double amplitude = 0.0;
  double frequency = 0.0;
  std::vector<int> components;

  Eigen::VectorXd eval(int t, int state_dim) const;
};

/// Discrete-time control system x(t+1) = nominal(x(t), u(t)) + d(t). The
/// nominal map is time-invariant; all time dependence enters through the
/// optional disturbance. Jacobians of the nominal map are optional and, when
/// present, let the optimizer use analytic gradients.
struct ControlSystem {
  int state_dim = 0;
  int input_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      nominal;
  std::optional<DisturbanceSpec> disturbance;
  ConstraintSet state_set = ConstraintSet::unbounded(0);
  ConstraintSet input_set = ConstraintSet::unbounded(0);
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      jacobian_state;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      jacobian_input;

  /// Applies one step of the true dynamics at absolute time t. Throws
  /// DimensionError on mismatched arguments.
  Eigen::VectorXd transition(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                             int t) const;

  /// Copy of this system with the disturbance removed, for prediction.
  ControlSystem without_disturbance() const;
};

/// Linear system x(t+1) = A x + B u (+ optional disturbance) with analytic
/// Jacobians and the given constraint sets (unbounded by default).
ControlSystem make_linear_system(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
    std::optional<DisturbanceSpec> disturbance = std::nullopt);

ControlSystem make_linear_system(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B,
                                 std::optional<DisturbanceSpec> disturbance,
                                 ConstraintSet state_set,
                                 ConstraintSet input_set);

}  // namespace fsclf
