#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "fsclf/comparison.hpp"
#include "fsclf/measurement.hpp"
#include "fsclf/system.hpp"

namespace fsclf {

/// Result of fitting linear growth coefficients to one-step transitions.
struct KBoundednessReport {
  /// True when finite coefficients exist over the samples.
  bool finite_fit = false;
  /// Minimal coefficients (by c1+c2) with
  /// omega1(g(x,u)) <= c1*omega1(x) + c2*omega2(u) over all samples.
  double c1 = 0.0;
  double c2 = 0.0;
  ComparisonFunction kappa1 = ComparisonFunction::linear(0.0);
  ComparisonFunction kappa2 = ComparisonFunction::linear(0.0);
  /// Max over samples of omega1(g) - (c1*omega1(x) + c2*omega2(u)); at most
  /// a rounding error above 0 when finite_fit holds.
  double worst_violation = 0.0;
  /// Sample indices proving that no finite fit exists (omega1(g) > 0 while
  /// omega1(x) = omega2(u) = 0); empty when finite_fit holds.
  std::vector<int> violating_samples;
};

/// Fits minimal linear coefficients bounding the one-step growth of the
/// nominal map through the two measurement functionals, over the given
/// (state, input) samples. Throws ValidationError on an empty sample list.
KBoundednessReport check_K_bounded(
    const ControlSystem& system, const MeasurementFunction& omega1,
    const MeasurementFunction& omega2,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples);

}  // namespace fsclf
