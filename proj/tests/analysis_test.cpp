#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "example_fixtures.hpp"
#include "fsclf/analysis.hpp"
#include "fsclf/errors.hpp"
#include "fsclf/mpc.hpp"

namespace fsclf {
namespace {

using testutil::example_A;
using testutil::example_B;
using testutil::example_fsclf;
using testutil::example_P;
using testutil::example_state;
using testutil::example_system_nominal;
using testutil::example_system_perturbed;

// Scalar-input one-step reachability oracle: the minimum of V(Ax + Bu) over
// u is attained at the stationary point of the quadratic in u.
double min_one_step_value(const Eigen::VectorXd& x) {
  const Eigen::MatrixXd A = example_A();
  const Eigen::MatrixXd B = example_B();
  const Eigen::MatrixXd P = example_P();
  const double denom = (B.transpose() * P * B)(0, 0);
  const double ustar = -(B.transpose() * P * A * x)(0, 0) / denom;
  const Eigen::VectorXd next = A * x + B * Eigen::VectorXd::Constant(1, ustar);
  return next.dot(P * next);
}

ClosedLoopConfig loop_config(Algorithm algorithm, int horizon, int T) {
  ClosedLoopConfig config;
  config.algorithm = algorithm;
  config.horizon = horizon;
  config.total_steps = T;
  return config;
}

// Autonomous scalar contraction x+ = a x with a zero input column, useful
// because every analysis quantity has a closed form.
ControlSystem scalar_decay_system(double a) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << a;
  B << 0.0;
  return make_linear_system(A, B);
}

TEST(Certification, ThreeStepDecayIsCertified) {
  const FsCLF f = example_fsclf(3);
  const auto samples = level_set_samples(f, 64, 0);
  const auto report =
      certify_fsclf(example_system_nominal(), f, samples, SolverConfig{});
  EXPECT_TRUE(report.certified);
  EXPECT_EQ(report.samples_tested, 64);
  EXPECT_EQ(report.feasible_count, 64);
  EXPECT_LE(report.max_ratio, 0.9 + 1e-5);
  EXPECT_GT(report.min_ratio, 0.0);
  EXPECT_LE(report.worst_residual, 1e-6);
}

TEST(Certification, OneStepDecayFailsAndMatchesTheReachabilityOracle) {
  const FsCLF f = example_fsclf(1);
  const auto samples = level_set_samples(f, 64, 0);
  const auto report =
      certify_fsclf(example_system_nominal(), f, samples, SolverConfig{});
  EXPECT_FALSE(report.certified);
  EXPECT_EQ(report.samples_tested, 64);

  // Independently decide feasibility per sample from the closed-form
  // one-step minimum; samples within 1e-4 of the threshold are skipped as
  // genuinely borderline.
  int oracle_feasible = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double vmin = min_one_step_value(samples[k]);
    if (vmin <= 0.9) ++oracle_feasible;
    if (std::abs(vmin - 0.9) > 1e-4) {
      EXPECT_EQ(report.samples[k].feasible, vmin <= 0.9)
          << "sample " << k << " one-step minimum " << vmin;
    }
  }
  EXPECT_EQ(report.feasible_count, oracle_feasible);
  EXPECT_EQ(report.feasible_count, 22);
}

TEST(Certification, ZeroLevelSampleIsFeasibleByConvention) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
  P(0, 0) = 1.0;
  P(1, 1) = 1.0;
  const FsCLF f = make_quadratic_fsclf(P, 0.9, 1);
  // V vanishes along the third axis.
  std::vector<Eigen::VectorXd> samples = {Eigen::Vector3d(0.0, 0.0, 1.0)};
  const auto report =
      certify_fsclf(example_system_nominal(), f, samples, SolverConfig{});
  ASSERT_EQ(report.samples.size(), 1u);
  EXPECT_TRUE(report.samples[0].feasible);
  EXPECT_DOUBLE_EQ(report.samples[0].ratio, 0.0);
}

TEST(Certification, CycleConcatenationCompoundsTheDecay) {
  const auto sys = example_system_nominal();
  const FsCLF f3 = example_fsclf(3);
  const auto samples3 = level_set_samples(f3, 64, 0);
  const auto report3 = certify_fsclf(sys, f3, samples3, SolverConfig{});
  ASSERT_TRUE(report3.certified);

  // Two certified cycles compose: six steps admit roughly the squared
  // ratio. The cushion absorbs directions between the level-set samples,
  // where the intermediate three-step optimum is not pinned by the grid.
  const double rho = report3.max_ratio;
  const FsCLF f6 = make_quadratic_fsclf(example_P(),
                                        std::min(rho * rho + 1e-2, 0.999), 6);
  const auto samples6 = level_set_samples(f6, 64, 0);
  const auto report6 = certify_fsclf(sys, f6, samples6, SolverConfig{});
  EXPECT_TRUE(report6.certified);
}

TEST(LevelSetSamples, LieOnTheUnitLevelSet) {
  const FsCLF f = example_fsclf();
  const auto samples = level_set_samples(f, 64, 0);
  ASSERT_EQ(samples.size(), 64u);
  for (const auto& x : samples) {
    ASSERT_EQ(x.size(), 3);
    EXPECT_NEAR(eval_V(f, x), 1.0, 1e-9);
  }
  // Distinct seeds rotate the point set.
  const auto rotated = level_set_samples(f, 64, 1);
  EXPECT_GT((samples[0] - rotated[0]).norm(), 1e-6);
  EXPECT_THROW(level_set_samples(f, 0, 0), ValidationError);
}

TEST(LevelSetSamples, DegenerateDirectionsStayAtUnitNorm) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, 2);
  P(0, 0) = 1.0;
  const FsCLF f = make_quadratic_fsclf(P, 0.9, 1);
  const auto samples = level_set_samples(f, 16, 0);
  for (const auto& x : samples) {
    const double v = eval_V(f, x);
    EXPECT_LE(v, 1.0 + 1e-9);
    EXPECT_GT(x.norm(), 1e-12);
  }
}

TEST(ConverseDecay, HoldsAlongTheNominalClosedLoop) {
  const auto sys = example_system_nominal();
  const FsCLF f = example_fsclf();
  const auto run = run_multistep(sys, sys, f, example_state(), 60,
                                 loop_config(Algorithm::MultiStep, 6, 60));
  const auto report = converse_decay_check(run, f.omega, 6);
  EXPECT_FALSE(report.vacuous);
  EXPECT_TRUE(report.satisfied);
  EXPECT_EQ(report.cycles_used, 10);
  EXPECT_LE(report.lambda_hat, 0.9 + 1e-6);
}

TEST(ConverseDecay, FlagsExpansionAndVacuousInputs) {
  ClosedLoopResult fake;
  fake.trajectory.states = {Eigen::VectorXd::Ones(1) * 1.0,
                            Eigen::VectorXd::Ones(1) * 2.0,
                            Eigen::VectorXd::Ones(1) * 4.0};
  fake.trajectory.inputs = {Eigen::VectorXd::Zero(1),
                            Eigen::VectorXd::Zero(1)};
  const auto omega = MeasurementFunction::euclidean_norm(1);
  const auto grow = converse_decay_check(fake, omega, 1);
  EXPECT_FALSE(grow.satisfied);
  EXPECT_NEAR(grow.lambda_hat, 2.0, 1e-12);

  ClosedLoopResult zero;
  zero.trajectory.states = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  zero.trajectory.inputs = {Eigen::VectorXd::Zero(1)};
  const auto report = converse_decay_check(zero, omega, 1);
  EXPECT_TRUE(report.vacuous);
  EXPECT_FALSE(report.satisfied);

  EXPECT_THROW(converse_decay_check(zero, omega, 5), ValidationError);
}

TEST(HorizonBound, MatchesHandComputedValues) {
  EXPECT_EQ(horizon_bound(2.0), 3);
  EXPECT_EQ(horizon_bound(4.0), 6);
  EXPECT_EQ(horizon_bound(1.0001), 2);
  EXPECT_EQ(horizon_bound(1.0), 1);
  EXPECT_EQ(horizon_bound(0.5), 1);
  EXPECT_THROW(horizon_bound(0.0), ValidationError);
  EXPECT_THROW(horizon_bound(-1.0), ValidationError);
}

TEST(HorizonBound, GrowsMonotonicallyWithGamma) {
  int previous = 1;
  for (double gamma = 1.05; gamma <= 100.0; gamma += 0.1) {
    const int bound = horizon_bound(gamma);
    EXPECT_GE(bound, previous) << "gamma " << gamma;
    previous = bound;
  }
  EXPECT_GT(previous, horizon_bound(2.0));
}

TEST(HorizonBoundInputsTest, GammaValidatesItsRange) {
  HorizonBoundInputs inputs{0.5, 1.0, 1};
  EXPECT_DOUBLE_EQ(inputs.gamma(), 2.0);
  HorizonBoundInputs six{0.25, 0.5, 3};
  EXPECT_DOUBLE_EQ(six.gamma(), 2.0);
  EXPECT_THROW((HorizonBoundInputs{1.0, 1.0, 1}.gamma()), ValidationError);
  EXPECT_THROW((HorizonBoundInputs{0.5, 0.0, 1}.gamma()), ValidationError);
  EXPECT_THROW((HorizonBoundInputs{0.5, 1.0, 0}.gamma()), ValidationError);
}

TEST(TransientFit, ScalarContractionHasClosedFormConstants) {
  // x+ = 0.5 x with V = x^2: after two steps V scales by 0.0625 and the
  // intermediate state gives d = 0.25.
  const auto sys = scalar_decay_system(0.5);
  const FsCLF f = make_quadratic_fsclf(Eigen::MatrixXd::Identity(1, 1),
                                       0.25, 2);
  std::vector<Eigen::VectorXd> samples = {Eigen::VectorXd::Ones(1),
                                          -Eigen::VectorXd::Ones(1)};
  const auto constants = fit_transient_constants(sys, f, samples,
                                                 SolverConfig{});
  EXPECT_NEAR(constants.c, 0.0625, 1e-9);
  EXPECT_NEAR(constants.d, 0.25, 1e-9);
}

TEST(TransientFit, ExampleConstantsLandInTheExpectedRanges) {
  const FsCLF f = example_fsclf();
  const auto samples = level_set_samples(f, 64, 0);
  const auto constants = fit_transient_constants(example_system_nominal(), f,
                                                 samples, SolverConfig{});
  // Solutions sit on the contraction boundary, so c approaches the decay
  // gain from below (up to the feasibility tolerance).
  EXPECT_LE(constants.c, 0.9 + 1e-5);
  EXPECT_GE(constants.c, 0.5);
  EXPECT_NEAR(constants.d, 5.6524, 1e-3);
  const HorizonBoundInputs inputs{constants.c, constants.d, 6};
  EXPECT_GE(horizon_bound(inputs.gamma()), 6);
}

TEST(TransientFit, RejectsZeroSetAndInfeasibleSamples) {
  const auto sys = example_system_nominal();
  const FsCLF f = example_fsclf();
  std::vector<Eigen::VectorXd> zero = {Eigen::VectorXd::Zero(3)};
  EXPECT_THROW(fit_transient_constants(sys, f, zero, SolverConfig{}),
               ValidationError);
  EXPECT_THROW(fit_transient_constants(sys, f, {}, SolverConfig{}),
               ValidationError);

  const auto clamped = make_linear_system(
      example_A(), example_B(), std::nullopt, ConstraintSet::unbounded(3),
      ConstraintSet::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)));
  const FsCLF f1 = example_fsclf(1);
  std::vector<Eigen::VectorXd> samples = {example_state()};
  EXPECT_THROW(fit_transient_constants(clamped, f1, samples, SolverConfig{}),
               ValidationError);
}

TEST(Deviation, WindowedMaximumAndValidation) {
  Trajectory traj;
  traj.states = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
                 -2.0 * Eigen::VectorXd::Ones(1),
                 3.0 * Eigen::VectorXd::Ones(1)};
  traj.inputs = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                 Eigen::VectorXd::Zero(1)};
  EXPECT_DOUBLE_EQ(max_deviation_post_transient(traj, 0, 0), 3.0);
  EXPECT_DOUBLE_EQ(max_deviation_post_transient(traj, 0, 3), 3.0);
  EXPECT_THROW(max_deviation_post_transient(traj, 1, 0), ValidationError);
  EXPECT_THROW(max_deviation_post_transient(traj, 0, 4), ValidationError);
  EXPECT_THROW(max_deviation_post_transient(traj, 0, -1), ValidationError);
}

TEST(Deviation, WindowChoiceBarelyMovesThePostTransientValue) {
  const auto run = run_multistep(
      example_system_perturbed(), example_system_nominal(), example_fsclf(),
      example_state(), 100, loop_config(Algorithm::MultiStep, 6, 100));
  const double w36 = max_deviation_post_transient(run.trajectory, 0, 36);
  const double w48 = max_deviation_post_transient(run.trajectory, 0, 48);
  const double w60 = max_deviation_post_transient(run.trajectory, 0, 60);
  EXPECT_NEAR(w48, w36, 0.05 * w36);
  EXPECT_NEAR(w60, w36, 0.05 * w36);
}

TEST(Envelope, GeometricSequenceIsRecoveredExactly) {
  Trajectory traj;
  for (int t = 0; t <= 20; ++t) {
    traj.states.push_back(Eigen::VectorXd::Constant(1, std::pow(0.8, t)));
    if (t < 20) traj.inputs.push_back(Eigen::VectorXd::Zero(1));
  }
  const auto omega = MeasurementFunction::euclidean_norm(1);
  const auto fit = fit_exponential_envelope(traj, omega);
  EXPECT_NEAR(fit.sigma, 0.8, 1e-9);
  EXPECT_NEAR(fit.C, 1.0, 1e-9);
  EXPECT_TRUE(fit.exponential);
}

TEST(Envelope, ConstantSequenceIsNotExponential) {
  Trajectory traj;
  traj.states = {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1),
                 Eigen::VectorXd::Ones(1)};
  traj.inputs = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  const auto omega = MeasurementFunction::euclidean_norm(1);
  const auto fit = fit_exponential_envelope(traj, omega);
  EXPECT_NEAR(fit.sigma, 1.0, 1e-12);
  EXPECT_FALSE(fit.exponential);

  Trajectory zero_start;
  zero_start.states = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
  zero_start.inputs = {Eigen::VectorXd::Zero(1)};
  EXPECT_THROW(fit_exponential_envelope(zero_start, omega), ValidationError);
}

TEST(Envelope, DominatesTheNominalClosedLoop) {
  const auto sys = example_system_nominal();
  const FsCLF f = example_fsclf();
  const auto run = run_multistep(sys, sys, f, example_state(), 60,
                                 loop_config(Algorithm::MultiStep, 6, 60));
  const auto fit = fit_exponential_envelope(run.trajectory, f.omega);
  EXPECT_TRUE(fit.exponential);
  EXPECT_LE(fit.sigma, 0.99);
  EXPECT_GE(fit.C, 1.0 - 1e-12);
  const double w0 = f.omega.eval(run.trajectory.states.front());
  for (std::size_t t = 0; t < run.trajectory.states.size(); ++t) {
    const double bound = fit.C * std::pow(fit.sigma, static_cast<double>(t));
    EXPECT_LE(f.omega.eval(run.trajectory.states[t]),
              bound * w0 * (1.0 + 1e-9) + 1e-300);
  }
}

TEST(Pipeline, FittedConstantsGiveAHorizonThatStabilizes) {
  // For x+ = 0.9 x with V = x^2 the fit is exact: c = 0.9^4, d = 0.81.
  const auto sys = scalar_decay_system(0.9);
  const FsCLF f = make_quadratic_fsclf(Eigen::MatrixXd::Identity(1, 1),
                                       0.81, 2);
  const auto samples = level_set_samples(f, 4, 0);
  const auto constants =
      fit_transient_constants(sys, f, samples, SolverConfig{});
  EXPECT_NEAR(constants.c, 0.6561, 1e-9);
  EXPECT_NEAR(constants.d, 0.81, 1e-9);

  const HorizonBoundInputs inputs{constants.c, constants.d, 2};
  const double gamma = inputs.gamma();
  EXPECT_NEAR(gamma, 2.0 * 0.81 / (1.0 - 0.6561), 1e-9);
  const int N = horizon_bound(gamma);
  EXPECT_EQ(N, 8);

  const auto run = run_classic(sys, sys, f, Eigen::VectorXd::Ones(1), N, 40,
                               loop_config(Algorithm::Classic, N, 40));
  EXPECT_LT(run.v_values.back(), 1e-2);
}

}  // namespace
}  // namespace fsclf
