#include "fsclf/fsclf.hpp"

#include <Eigen/Eigenvalues>

#include "fsclf/errors.hpp"

namespace fsclf {

FsCLF make_quadratic_fsclf(const Eigen::MatrixXd& P, double decay_c, int M) {
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw ValidationError("P must be square and nonempty");
  }
  const double scale = P.cwiseAbs().maxCoeff();
  if (!P.allFinite()) throw ValidationError("P must be finite");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale)) {
    throw ValidationError("P must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, scale)) {
    throw ValidationError("P must be positive semidefinite");
  }
  if (!(decay_c >= 0.0 && decay_c < 1.0)) {
    throw ValidationError("decay coefficient must lie in [0,1)");
  }
  if (M < 1) throw ValidationError("step count M must be >= 1");

  FsCLF f;
  f.state_dim = static_cast<int>(P.rows());
  f.M = M;
  f.V = [P](const Eigen::VectorXd& x) { return x.dot(P * x); };
  f.V_gradient = [P](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(2.0 * (P * x));
  };
  f.omega = MeasurementFunction::quadratic_form(P);
  f.lower = ComparisonFunction::identity();
  f.upper = ComparisonFunction::identity();
  f.decay = ComparisonFunction::linear(decay_c);
  return f;
}

FsCLF make_passthrough_fsclf(MeasurementFunction omega, int state_dim,
                             double decay_c, int M) {
  if (!(decay_c >= 0.0 && decay_c < 1.0)) {
    throw ValidationError("decay coefficient must lie in [0,1)");
  }
  if (M < 1) throw ValidationError("step count M must be >= 1");
  if (state_dim <= 0) throw ValidationError("state dimension must be positive");

  FsCLF f;
  f.state_dim = state_dim;
  f.M = M;
  f.V = omega.eval;
  f.omega = std::move(omega);
  f.lower = ComparisonFunction::identity();
  f.upper = ComparisonFunction::identity();
  f.decay = ComparisonFunction::linear(decay_c);
  return f;
}

double eval_V(const FsCLF& f, const Eigen::VectorXd& x) {
  if (x.size() != f.state_dim) {
    throw DimensionError("state dimension mismatch in eval_V");
  }
  return f.V(x);
}

}  // namespace fsclf
