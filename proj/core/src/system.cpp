#include "fsclf/system.hpp"

#include <cmath>

#include "fsclf/errors.hpp"

namespace fsclf {

Eigen::VectorXd DisturbanceSpec::eval(int t, int state_dim) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(state_dim);
  const double value = amplitude * std::sin(frequency * static_cast<double>(t));
  for (int c : components) {
    if (c < 0 || c >= state_dim) {
      throw ValidationError("disturbance component index out of range");
    }
    d(c) += value;
  }
  return d;
}

Eigen::VectorXd ControlSystem::transition(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& u,
                                          int t) const {
  if (x.size() != state_dim) {
    throw DimensionError("state dimension mismatch in transition");
  }
  if (u.size() != input_dim) {
    throw DimensionError("input dimension mismatch in transition");
  }
  Eigen::VectorXd next = nominal(x, u);
  if (next.size() != state_dim) {
    throw DimensionError("nominal map returned a vector of wrong dimension");
  }
  if (disturbance) next += disturbance->eval(t, state_dim);
  return next;
}

ControlSystem ControlSystem::without_disturbance() const {
  ControlSystem copy = *this;
  copy.disturbance.reset();
  return copy;
}

ControlSystem make_linear_system(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B,
                                 std::optional<DisturbanceSpec> disturbance) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  return make_linear_system(A, B, std::move(disturbance),
                            ConstraintSet::unbounded(n),
                            ConstraintSet::unbounded(m));
}

ControlSystem make_linear_system(const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B,
                                 std::optional<DisturbanceSpec> disturbance,
                                 ConstraintSet state_set,
                                 ConstraintSet input_set) {
  if (A.rows() != A.cols()) throw ValidationError("A must be square");
  if (B.rows() != A.rows()) {
    throw DimensionError("B must have as many rows as A");
  }
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (state_set.dim() != n || input_set.dim() != m) {
    throw DimensionError("constraint set dimensions do not match the system");
  }

  ControlSystem sys;
  sys.state_dim = n;
  sys.input_dim = m;
  sys.nominal = [A, B](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return Eigen::VectorXd(A * x + B * u);
  };
  sys.disturbance = std::move(disturbance);
  sys.state_set = std::move(state_set);
  sys.input_set = std::move(input_set);
  sys.jacobian_state = [A](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return A;
  };
  sys.jacobian_input = [B](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return B;
  };
  return sys;
}

}  // namespace fsclf
