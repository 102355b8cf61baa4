#pragma once

#include <Eigen/Core>
#include <vector>

#include "fsclf/system.hpp"

namespace fsclf {

/// Ordered finite sequence of input vectors.
struct ControlSequence {
  std::vector<Eigen::VectorXd> inputs;

  int length() const { return static_cast<int>(inputs.size()); }

  /// Splits a stacked decision vector into k inputs of dimension input_dim.
  static ControlSequence from_stacked(const Eigen::VectorXd& stacked,
                                      int input_dim);

  /// Concatenates the inputs into one vector.
  Eigen::VectorXd stacked() const;
};

/// States x(0..T) and the inputs u(0..T-1) that produced them, anchored at an
/// absolute start time.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
  int start_time = 0;

  /// Number of steps T (states has T+1 entries).
  int length() const { return static_cast<int>(inputs.size()); }
};

/// Simulates the system forward from the given state, applying the controls
/// in order. The disturbance, when present, is evaluated at absolute times
/// start_time, start_time+1, ... Throws DimensionError on mismatched
/// dimensions and NonFiniteError (naming the step) if a state stops being
/// finite.
Trajectory rollout(const ControlSystem& system, const Eigen::VectorXd& initial,
                   const ControlSequence& controls, int start_time = 0);

}  // namespace fsclf
