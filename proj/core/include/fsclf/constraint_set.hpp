#pragma once

#include <Eigen/Core>

namespace fsclf {

/// Constraint set over a real vector space: either unbounded or an
/// axis-aligned box. Membership uses an absolute tolerance; projection maps
/// any finite vector to its nearest member.
class ConstraintSet {
 public:
  static ConstraintSet unbounded(int dim);
  static ConstraintSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  bool is_box() const { return is_box_; }

  /// Componentwise bounds; -inf/+inf for the unbounded set.
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const;
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

 private:
  ConstraintSet(Eigen::VectorXd lower, Eigen::VectorXd upper, bool is_box);
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  bool is_box_;
};

}  // namespace fsclf
