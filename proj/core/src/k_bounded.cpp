#include "fsclf/k_bounded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsclf/errors.hpp"

namespace fsclf {

namespace {

struct HalfPlane {
  // p*c1 + q*c2 >= 1 with p, q >= 0.
  double p;
  double q;
};

bool feasible(const std::vector<HalfPlane>& planes, double c1, double c2) {
  for (const auto& h : planes) {
    if (h.p * c1 + h.q * c2 < 1.0 - 1e-10) return false;
  }
  return true;
}

}  // namespace

KBoundednessReport check_K_bounded(
    const ControlSystem& system, const MeasurementFunction& omega1,
    const MeasurementFunction& omega2,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& samples) {
  if (samples.empty()) {
    throw ValidationError("check_K_bounded requires at least one sample");
  }

  KBoundednessReport report;
  std::vector<double> a(samples.size()), b(samples.size()), v(samples.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    const auto& [x, u] = samples[k];
    a[k] = omega1.eval(x);
    b[k] = omega2.eval(u);
    v[k] = omega1.eval(system.transition(x, u, 0));
    if (v[k] > 0.0 && a[k] <= 0.0 && b[k] <= 0.0) {
      report.violating_samples.push_back(static_cast<int>(k));
    }
  }
  if (!report.violating_samples.empty()) {
    report.finite_fit = false;
    report.worst_violation = 0.0;
    for (int k : report.violating_samples) {
      report.worst_violation = std::max(report.worst_violation, v[k]);
    }
    return report;
  }

  // Normalize binding constraints to p*c1 + q*c2 >= 1 and keep only the
  // Pareto-minimal (p, q) pairs; dominated half-planes are implied.
  std::vector<HalfPlane> planes;
  for (size_t k = 0; k < samples.size(); ++k) {
    if (v[k] <= 0.0) continue;
    planes.push_back({a[k] / v[k], b[k] / v[k]});
  }
  std::vector<HalfPlane> frontier;
  for (const auto& h : planes) {
    bool dominated = false;
    for (const auto& g : planes) {
      if (&g == &h) continue;
      if (g.p <= h.p && g.q <= h.q && (g.p < h.p || g.q < h.q)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) frontier.push_back(h);
  }

  double best_sum = std::numeric_limits<double>::infinity();
  double best_c1 = 0.0, best_c2 = 0.0;
  auto consider = [&](double c1, double c2) {
    c1 = std::max(c1, 0.0);
    c2 = std::max(c2, 0.0);
    if (!feasible(frontier, c1, c2)) return;
    if (c1 + c2 < best_sum) {
      best_sum = c1 + c2;
      best_c1 = c1;
      best_c2 = c2;
    }
  };

  if (frontier.empty()) {
    consider(0.0, 0.0);
  }
  for (size_t i = 0; i < frontier.size(); ++i) {
    if (frontier[i].p > 0.0) consider(1.0 / frontier[i].p, 0.0);
    if (frontier[i].q > 0.0) consider(0.0, 1.0 / frontier[i].q);
    for (size_t j = i + 1; j < frontier.size(); ++j) {
      const double det =
          frontier[i].p * frontier[j].q - frontier[j].p * frontier[i].q;
      if (std::abs(det) < 1e-14) continue;
      consider((frontier[j].q - frontier[i].q) / det,
               (frontier[i].p - frontier[j].p) / det);
    }
  }
  if (!std::isfinite(best_sum)) {
    // Numerically degenerate frontier; fall back to the axis-aligned bound.
    double c1 = 0.0, c2 = 0.0;
    for (const auto& h : frontier) {
      if (h.p > 0.0) c1 = std::max(c1, 1.0 / h.p);
      if (h.q > 0.0) c2 = std::max(c2, 1.0 / h.q);
    }
    best_c1 = c1;
    best_c2 = c2;
  }

  report.finite_fit = true;
  report.c1 = best_c1;
  report.c2 = best_c2;
  report.kappa1 = ComparisonFunction::linear(best_c1);
  report.kappa2 = ComparisonFunction::linear(best_c2);
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < samples.size(); ++k) {
    report.worst_violation = std::max(
        report.worst_violation, v[k] - (best_c1 * a[k] + best_c2 * b[k]));
  }
  return report;
}

}  // namespace fsclf
