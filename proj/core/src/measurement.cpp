#include "fsclf/measurement.hpp"

#include "fsclf/errors.hpp"

namespace fsclf {

MeasurementFunction MeasurementFunction::euclidean_norm(int dim) {
  if (dim <= 0) throw ValidationError("measurement dimension must be positive");
  MeasurementFunction m;
  m.eval = [](const Eigen::VectorXd& x) { return x.norm(); };
  m.zero_witness = Eigen::VectorXd::Zero(dim);
  return m;
}

MeasurementFunction MeasurementFunction::quadratic_form(
    const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw ValidationError("quadratic form matrix must be square");
  }
  MeasurementFunction m;
  m.eval = [P](const Eigen::VectorXd& x) { return x.dot(P * x); };
  m.zero_witness = Eigen::VectorXd::Zero(P.rows());
  return m;
}

}  // namespace fsclf
