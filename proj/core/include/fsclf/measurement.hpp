#pragma once

#include <Eigen/Core>
#include <functional>

namespace fsclf {

/// Continuous nonnegative state functional with a known zero point. Stability
/// of the closed loop is expressed through such a functional rather than a
/// norm, so set-valued targets are covered by the same machinery.
struct MeasurementFunction {
  std::function<double(const Eigen::VectorXd&)> eval;
  Eigen::VectorXd zero_witness;

  /// omega(x) = |x|_2, zero at the origin.
  static MeasurementFunction euclidean_norm(int dim);

  /// omega(x) = x' P x for symmetric positive-semidefinite P, zero at the
  /// origin.
  static MeasurementFunction quadratic_form(const Eigen::MatrixXd& P);
};

}  // namespace fsclf
