#include "fsclf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fsclf/errors.hpp"
#include "fsclf/ocp.hpp"

namespace fsclf {

namespace {

constexpr double kZeroFloor = 1e-300;
constexpr double kMeasurementFloor = 1e-12;
constexpr double kCertificationMargin = 1e-3;

double terminal_ratio(const OcpSolution& sol, const FsCLF& fsclf,
                      double v_initial) {
  const Eigen::VectorXd& terminal = sol.predicted.states.back();
  return fsclf.V(terminal) / v_initial;
}

// Scales a direction onto the V = 1 level set by bracketing and bisecting
// the radial equation; directions along which V never reaches 1 are kept at
// unit norm.
Eigen::VectorXd scale_to_level_set(const FsCLF& fsclf,
                                   const Eigen::VectorXd& direction) {
  auto radial = [&](double s) { return fsclf.V(s * direction) - 1.0; };
  double lo = 0.0;
  double hi = 1.0;
  while (radial(hi) < 0.0 && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  if (radial(hi) < 0.0) {
    return direction;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (radial(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) * direction;
}

std::vector<Eigen::VectorXd> fibonacci_sphere(int count, int seed) {
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::VectorXd> directions;
  directions.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = 2.0 * std::numbers::pi * i / golden + seed;
    Eigen::VectorXd p(3);
    p << r * std::cos(theta), r * std::sin(theta), z;
    directions.push_back(std::move(p));
  }
  return directions;
}

std::vector<Eigen::VectorXd> seeded_directions(int dim, int count, int seed) {
  std::mt19937 rng(12345u + static_cast<unsigned>(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> directions;
  directions.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(directions.size()) < count) {
    Eigen::VectorXd p(dim);
    for (int k = 0; k < dim; ++k) {
      p(k) = gauss(rng);
    }
    const double norm = p.norm();
    if (norm < 1e-8) {
      continue;
    }
    directions.push_back(p / norm);
  }
  return directions;
}

}  // namespace

double HorizonBoundInputs::gamma() const {
  if (!(c >= 0.0) || !(c < 1.0)) {
    throw ValidationError("transient constant c must lie in [0, 1)");
  }
  if (!(d > 0.0)) {
    throw ValidationError("transient constant d must be positive");
  }
  if (M < 1) {
    throw ValidationError("step count M must be at least 1");
  }
  return M * d / (1.0 - c);
}

CertificationReport certify_fsclf(const ControlSystem& system,
                                  const FsCLF& fsclf,
                                  const std::vector<Eigen::VectorXd>& samples,
                                  const SolverConfig& config) {
  CertificationReport report;
  report.samples_tested = static_cast<int>(samples.size());
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    SampleCertification record;
    record.index = i;
    const double v0 = fsclf.V(samples[static_cast<std::size_t>(i)]);
    if (v0 < kZeroFloor) {
      record.feasible = true;
      record.ratio = 0.0;
      record.residual = 0.0;
    } else {
      OcpSpec spec{Contractive{fsclf.M}, system, fsclf,
                   samples[static_cast<std::size_t>(i)], 0};
      try {
        const OcpSolution sol = solve_ocp(spec, config);
        record.feasible = true;
        record.ratio = terminal_ratio(sol, fsclf, v0);
        record.residual = sol.max_residual;
      } catch (const OcpInfeasibleError& err) {
        record.feasible = false;
        record.ratio = terminal_ratio(err.best(), fsclf, v0);
        record.residual = err.best().max_residual;
      }
    }
    report.worst_residual = std::max(report.worst_residual, record.residual);
    if (record.feasible) {
      ++report.feasible_count;
      min_ratio = std::min(min_ratio, record.ratio);
      max_ratio = std::max(max_ratio, record.ratio);
    }
    report.samples.push_back(record);
  }
  if (report.feasible_count > 0) {
    report.min_ratio = min_ratio;
    report.max_ratio = max_ratio;
  }
  report.certified = report.feasible_count == report.samples_tested &&
                     report.samples_tested > 0 &&
                     report.max_ratio < 1.0 - kCertificationMargin;
  return report;
}

std::vector<Eigen::VectorXd> level_set_samples(const FsCLF& fsclf, int count,
                                               int seed) {
  if (count < 1) {
    throw ValidationError("sample count must be at least 1");
  }
  if (fsclf.state_dim < 1) {
    throw ValidationError("state dimension must be at least 1");
  }
  std::vector<Eigen::VectorXd> directions =
      fsclf.state_dim == 3 ? fibonacci_sphere(count, seed)
                           : seeded_directions(fsclf.state_dim, count, seed);
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(directions.size());
  for (const Eigen::VectorXd& p : directions) {
    samples.push_back(scale_to_level_set(fsclf, p));
  }
  return samples;
}

ConverseDecayReport converse_decay_check(const ClosedLoopResult& closed_loop,
                                         const MeasurementFunction& omega,
                                         int M) {
  if (M < 1) {
    throw ValidationError("cycle length M must be at least 1");
  }
  const int T = closed_loop.trajectory.length();
  if (T < M) {
    throw ValidationError("trajectory is shorter than one cycle");
  }
  ConverseDecayReport report;
  for (int start = 0; start + M <= T; start += M) {
    const double w0 =
        omega.eval(closed_loop.trajectory.states[static_cast<std::size_t>(start)]);
    if (w0 < kMeasurementFloor) {
      continue;
    }
    const double w1 = omega.eval(
        closed_loop.trajectory.states[static_cast<std::size_t>(start + M)]);
    report.lambda_hat = std::max(report.lambda_hat, w1 / w0);
    ++report.cycles_used;
  }
  report.vacuous = report.cycles_used == 0;
  report.satisfied = !report.vacuous && report.lambda_hat < 1.0;
  return report;
}

int horizon_bound(double gamma) {
  if (!(gamma > 0.0)) {
    throw ValidationError("gamma must be positive");
  }
  if (gamma <= 1.0) {
    return 1;
  }
  const double bound =
      2.0 + std::log(gamma - 1.0) / (std::log(gamma) - std::log(gamma - 1.0));
  return static_cast<int>(std::floor(bound)) + 1;
}

TransientConstants fit_transient_constants(
    const ControlSystem& system, const FsCLF& fsclf,
    const std::vector<Eigen::VectorXd>& samples, const SolverConfig& config) {
  if (samples.empty()) {
    throw ValidationError("transient constants need at least one sample");
  }
  TransientConstants fit;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v0 = fsclf.V(samples[i]);
    if (v0 < kZeroFloor) {
      throw ValidationError("sample " + std::to_string(i) +
                            " lies on the zero set of V");
    }
    OcpSpec spec{Contractive{fsclf.M}, system, fsclf, samples[i], 0};
    OcpSolution sol;
    try {
      sol = solve_ocp(spec, config);
    } catch (const OcpInfeasibleError&) {
      throw ValidationError("sample " + std::to_string(i) +
                            " is infeasible, transient constants undefined");
    }
    fit.c = std::max(fit.c, terminal_ratio(sol, fsclf, v0));
    for (int k = 1; k < fsclf.M; ++k) {
      const double vk =
          fsclf.V(sol.predicted.states[static_cast<std::size_t>(k)]);
      fit.d = std::max(fit.d, vk / v0);
    }
  }
  return fit;
}

double max_deviation_post_transient(const Trajectory& traj, int component,
                                    int window_start) {
  const int T = traj.length();
  if (traj.states.empty()) {
    throw ValidationError("trajectory is empty");
  }
  if (component < 0 || component >= traj.states.front().size()) {
    throw ValidationError("component index out of range");
  }
  if (window_start < 0 || window_start > T) {
    throw ValidationError("window start outside the trajectory");
  }
  double worst = 0.0;
  for (int t = window_start; t <= T; ++t) {
    worst = std::max(
        worst, std::abs(traj.states[static_cast<std::size_t>(t)](component)));
  }
  return worst;
}

EnvelopeFit fit_exponential_envelope(const Trajectory& traj,
                                     const MeasurementFunction& omega) {
  if (traj.states.empty()) {
    throw ValidationError("trajectory is empty");
  }
  std::vector<double> values;
  values.reserve(traj.states.size());
  for (const Eigen::VectorXd& x : traj.states) {
    values.push_back(omega.eval(x));
  }
  if (!(values.front() > 0.0)) {
    throw ValidationError("envelope fit needs omega(x(0)) > 0");
  }
  std::size_t usable = values.size();
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (values[t] <= 0.0) {
      usable = t;
      break;
    }
  }
  EnvelopeFit fit;
  if (usable < 2) {
    fit.C = 1.0;
    fit.sigma = 0.0;
    fit.exponential = true;
    return fit;
  }

  const double log0 = std::log(values[0]);
  std::vector<double> ys(usable);
  for (std::size_t t = 0; t < usable; ++t) {
    ys[t] = std::log(values[t]) - log0;
  }

  // Upper convex hull of (t, y_t) by a monotone scan; collinear middle
  // points are dropped.
  std::vector<std::size_t> hull;
  for (std::size_t t = 0; t < usable; ++t) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull[hull.size() - 1];
      const double cross = (static_cast<double>(b - a)) * (ys[t] - ys[a]) -
                           (ys[b] - ys[a]) * (static_cast<double>(t - a));
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(t);
  }

  double sum_t = 0.0;
  double sum_y = 0.0;
  double sum_tt = 0.0;
  double sum_ty = 0.0;
  for (std::size_t idx : hull) {
    const double t = static_cast<double>(idx);
    sum_t += t;
    sum_y += ys[idx];
    sum_tt += t * t;
    sum_ty += t * ys[idx];
  }
  const double n = static_cast<double>(hull.size());
  const double denom = n * sum_tt - sum_t * sum_t;
  double slope = 0.0;
  double intercept = ys[0];
  if (denom > 0.0) {
    slope = (n * sum_ty - sum_t * sum_y) / denom;
    intercept = (sum_y - slope * sum_t) / n;
  }

  double shift = 0.0;
  for (std::size_t t = 0; t < usable; ++t) {
    shift = std::max(shift,
                     ys[t] - (slope * static_cast<double>(t) + intercept));
  }
  intercept += shift;

  fit.C = std::exp(intercept);
  fit.sigma = std::exp(slope);
  fit.exponential = fit.sigma < 1.0;
  return fit;
}

}  // namespace fsclf
