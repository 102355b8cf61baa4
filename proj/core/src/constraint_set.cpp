#include "fsclf/constraint_set.hpp"

#include <limits>

#include "fsclf/errors.hpp"

namespace fsclf {

ConstraintSet::ConstraintSet(Eigen::VectorXd lower, Eigen::VectorXd upper,
                             bool is_box)
    : lower_(std::move(lower)), upper_(std::move(upper)), is_box_(is_box) {}

ConstraintSet ConstraintSet::unbounded(int dim) {
  if (dim < 0) throw ValidationError("constraint set dimension must be >= 0");
  const double inf = std::numeric_limits<double>::infinity();
  return ConstraintSet(Eigen::VectorXd::Constant(dim, -inf),
                       Eigen::VectorXd::Constant(dim, inf), false);
}

ConstraintSet ConstraintSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) {
    throw DimensionError("box bounds must have equal dimensions");
  }
  if ((lower.array() > upper.array()).any()) {
    throw ValidationError("box lower bound exceeds upper bound");
  }
  return ConstraintSet(std::move(lower), std::move(upper), true);
}

bool ConstraintSet::contains(const Eigen::VectorXd& v, double tol) const {
  if (v.size() != lower_.size()) {
    throw DimensionError("vector dimension does not match constraint set");
  }
  return (v.array() >= lower_.array() - tol).all() &&
         (v.array() <= upper_.array() + tol).all();
}

Eigen::VectorXd ConstraintSet::project(const Eigen::VectorXd& v) const {
  if (v.size() != lower_.size()) {
    throw DimensionError("vector dimension does not match constraint set");
  }
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

}  // namespace fsclf
