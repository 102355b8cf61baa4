#include "fsclf/trajectory.hpp"

#include <string>

#include "fsclf/errors.hpp"

namespace fsclf {

ControlSequence ControlSequence::from_stacked(const Eigen::VectorXd& stacked,
                                              int input_dim) {
  if (input_dim <= 0) throw ValidationError("input dimension must be positive");
  if (stacked.size() % input_dim != 0) {
    throw DimensionError("stacked vector is not a multiple of input dimension");
  }
  ControlSequence seq;
  const int k = static_cast<int>(stacked.size()) / input_dim;
  seq.inputs.reserve(k);
  for (int i = 0; i < k; ++i) {
    seq.inputs.push_back(stacked.segment(i * input_dim, input_dim));
  }
  return seq;
}

Eigen::VectorXd ControlSequence::stacked() const {
  if (inputs.empty()) return Eigen::VectorXd();
  const int m = static_cast<int>(inputs.front().size());
  Eigen::VectorXd z(static_cast<int>(inputs.size()) * m);
  for (int i = 0; i < length(); ++i) {
    z.segment(i * m, m) = inputs[i];
  }
  return z;
}

Trajectory rollout(const ControlSystem& system, const Eigen::VectorXd& initial,
                   const ControlSequence& controls, int start_time) {
  if (initial.size() != system.state_dim) {
    throw DimensionError("initial state dimension mismatch in rollout");
  }
  for (const auto& u : controls.inputs) {
    if (u.size() != system.input_dim) {
      throw DimensionError("control dimension mismatch in rollout");
    }
  }

  Trajectory traj;
  traj.start_time = start_time;
  traj.states.reserve(controls.length() + 1);
  traj.inputs = controls.inputs;
  traj.states.push_back(initial);
  for (int i = 0; i < controls.length(); ++i) {
    Eigen::VectorXd next =
        system.transition(traj.states.back(), controls.inputs[i], start_time + i);
    if (!next.allFinite()) {
      throw NonFiniteError("state became non-finite at step " +
                           std::to_string(start_time + i + 1));
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

}  // namespace fsclf
