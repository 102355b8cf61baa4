#pragma once

#include <Eigen/Core>
#include <functional>

#include "fsclf/comparison.hpp"
#include "fsclf/measurement.hpp"

namespace fsclf {

/// Finite-step control Lyapunov function candidate: a nonnegative function V
/// sandwiched between comparison functions of a measurement functional,
/// together with the decay map alpha and the step count M after which the
/// decay V(x(M)) <= alpha(V(x(0))) must be achievable by some admissible
/// input sequence.
struct FsCLF {
  std::function<double(const Eigen::VectorXd&)> V;
  /// Optional analytic gradient of V; empty means finite differences.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> V_gradient;
  MeasurementFunction omega;
  ComparisonFunction lower = ComparisonFunction::identity();
  ComparisonFunction upper = ComparisonFunction::identity();
  ComparisonFunction decay = ComparisonFunction::identity();
  int M = 1;
  int state_dim = 0;
};

/// V(x) = x' P x with symmetric positive-semidefinite P, decay c*r with
/// c in [0,1), measurement functional equal to V itself (identity sandwich).
/// Throws ValidationError if P is not symmetric PSD or c is out of range.
FsCLF make_quadratic_fsclf(const Eigen::MatrixXd& P, double decay_c, int M);

/// V := omega (the converse construction), decay c*r, identity sandwich.
FsCLF make_passthrough_fsclf(MeasurementFunction omega, int state_dim,
                             double decay_c, int M);

/// Evaluates V with a dimension check.
double eval_V(const FsCLF& f, const Eigen::VectorXd& x);

}  // namespace fsclf
