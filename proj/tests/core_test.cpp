#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "example_fixtures.hpp"
#include "fsclf/comparison.hpp"
#include "fsclf/constraint_set.hpp"
#include "fsclf/errors.hpp"
#include "fsclf/fsclf.hpp"
#include "fsclf/k_bounded.hpp"
#include "fsclf/measurement.hpp"
#include "fsclf/system.hpp"
#include "fsclf/trajectory.hpp"

namespace fsclf {
namespace {

using testutil::example_A;
using testutil::example_B;
using testutil::example_disturbance;
using testutil::example_P;
using testutil::example_state;
using testutil::example_system_nominal;

TEST(Comparison, LinearEvaluatesAsGain) {
  const auto f = ComparisonFunction::linear(0.9);
  EXPECT_DOUBLE_EQ(f(2.0), 1.8);
  EXPECT_DOUBLE_EQ(f(0.0), 0.0);
  EXPECT_THROW(ComparisonFunction::linear(-0.1), ValidationError);
}

TEST(Comparison, PowerMaxPicksTheLargerBranch) {
  const auto f = ComparisonFunction::power_max(2.0, 0.5, 2.0);
  EXPECT_NEAR(f(0.25), 2.0 * 0.5, 1e-12);
  EXPECT_NEAR(f(4.0), 2.0 * 16.0, 1e-12);
  EXPECT_THROW(ComparisonFunction::power_max(0.0, 1.0, 1.0), ValidationError);
  EXPECT_THROW(ComparisonFunction::power_max(1.0, -1.0, 1.0), ValidationError);
}

TEST(Comparison, ComposeChainsEvaluation) {
  const auto f = ComparisonFunction::compose(ComparisonFunction::linear(2.0),
                                             ComparisonFunction::linear(3.0));
  EXPECT_DOUBLE_EQ(f(1.5), 9.0);
  EXPECT_DOUBLE_EQ(ComparisonFunction::identity()(5.0), 5.0);
}

TEST(Comparison, ContractionCheckSeparatesGains) {
  EXPECT_TRUE(ComparisonFunction::linear(0.9).is_contraction());
  EXPECT_FALSE(ComparisonFunction::linear(1.0).is_contraction());
  EXPECT_FALSE(ComparisonFunction::linear(1.1).is_contraction());
  // r^0.5 exceeds r near zero, so the power-max form is not a contraction.
  EXPECT_FALSE(ComparisonFunction::power_max(1.0, 0.5, 2.0).is_contraction());
  EXPECT_TRUE(ComparisonFunction::power_max(0.5, 1.0, 1.0).is_contraction());
}

TEST(Measurement, EuclideanNormMatchesHandValue) {
  const auto omega = MeasurementFunction::euclidean_norm(3);
  Eigen::Vector3d x(3.0, 4.0, 0.0);
  EXPECT_DOUBLE_EQ(omega.eval(x), 5.0);
  EXPECT_EQ(omega.zero_witness.size(), 3);
  EXPECT_DOUBLE_EQ(omega.eval(omega.zero_witness), 0.0);
  EXPECT_THROW(MeasurementFunction::euclidean_norm(0), ValidationError);
}

TEST(Measurement, QuadraticFormMatchesHandValue) {
  Eigen::MatrixXd P(2, 2);
  P << 2.0, 0.0, 0.0, 3.0;
  const auto omega = MeasurementFunction::quadratic_form(P);
  Eigen::Vector2d x(1.0, 1.0);
  EXPECT_DOUBLE_EQ(omega.eval(x), 5.0);
  EXPECT_DOUBLE_EQ(omega.eval(omega.zero_witness), 0.0);
}

TEST(ConstraintSet, UnboundedAcceptsEverything) {
  const auto set = ConstraintSet::unbounded(2);
  EXPECT_FALSE(set.is_box());
  Eigen::Vector2d huge(1e100, -1e100);
  EXPECT_TRUE(set.contains(huge));
  EXPECT_EQ(set.project(huge), huge);
}

TEST(ConstraintSet, BoxMembershipAndProjection) {
  Eigen::Vector2d lo(-1.0, -1.0), hi(1.0, 1.0);
  const auto set = ConstraintSet::box(lo, hi);
  EXPECT_TRUE(set.is_box());
  EXPECT_EQ(set.dim(), 2);
  EXPECT_TRUE(set.contains(Eigen::Vector2d(0.0, 0.5)));
  EXPECT_FALSE(set.contains(Eigen::Vector2d(2.0, 0.0)));
  Eigen::Vector2d projected = set.project(Eigen::Vector2d(2.0, -3.0));
  EXPECT_EQ(projected, Eigen::Vector2d(1.0, -1.0));
  EXPECT_THROW(ConstraintSet::box(hi, lo), ValidationError);
}

TEST(System, LinearTransitionMatchesMatrixProduct) {
  const auto sys = example_system_nominal();
  Eigen::Vector3d x(1.0, 2.0, 3.0);
  Eigen::VectorXd u(1);
  u << 2.0;
  Eigen::VectorXd next = sys.transition(x, u, 0);
  Eigen::VectorXd expected = example_A() * x + example_B() * u;
  EXPECT_LT((next - expected).norm(), 1e-14);
  EXPECT_THROW(sys.transition(Eigen::Vector2d(1.0, 2.0), u, 0),
               DimensionError);
}

TEST(System, DisturbanceEntersSelectedComponentOnly) {
  const auto d = example_disturbance();
  Eigen::VectorXd w = d.eval(2, 3);
  EXPECT_DOUBLE_EQ(w(0), 0.1 * std::sin(0.5));
  EXPECT_DOUBLE_EQ(w(1), 0.0);
  EXPECT_DOUBLE_EQ(w(2), 0.0);

  const auto sys = make_linear_system(example_A(), example_B(), d);
  Eigen::Vector3d x(1.0, 0.0, 0.0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd next = sys.transition(x, u, 2);
  Eigen::VectorXd expected = example_A() * x + w;
  EXPECT_LT((next - expected).norm(), 1e-14);
}

TEST(System, WithoutDisturbanceDropsTheAdditiveTerm) {
  const auto sys = make_linear_system(example_A(), example_B(),
                                      example_disturbance());
  const auto nominal = sys.without_disturbance();
  EXPECT_FALSE(nominal.disturbance.has_value());
  Eigen::Vector3d x(1.0, 0.0, 0.0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
  EXPECT_EQ(nominal.transition(x, u, 2), Eigen::VectorXd(example_A() * x));
}

TEST(Rollout, ProducesAllStatesAndHonorsStartTime) {
  const auto sys = make_linear_system(example_A(), example_B(),
                                      example_disturbance());
  ControlSequence controls;
  controls.inputs = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  const auto traj = rollout(sys, example_state(), controls, 3);
  ASSERT_EQ(traj.states.size(), 3u);
  EXPECT_EQ(traj.length(), 2);
  EXPECT_EQ(traj.start_time, 3);
  EXPECT_EQ(traj.states[0], example_state());
  // The first step must apply the disturbance at absolute time 3.
  Eigen::VectorXd expected =
      sys.transition(example_state(), controls.inputs[0], 3);
  EXPECT_EQ(traj.states[1], expected);
}

TEST(Rollout, ReportsNonFiniteStates) {
  ControlSystem sys = example_system_nominal();
  sys.nominal = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return Eigen::VectorXd(x * std::numeric_limits<double>::quiet_NaN());
  };
  ControlSequence controls;
  controls.inputs = {Eigen::VectorXd::Zero(1)};
  EXPECT_THROW(rollout(sys, example_state(), controls), NonFiniteError);
}

TEST(Rollout, RejectsMismatchedInputDimension) {
  const auto sys = example_system_nominal();
  ControlSequence controls;
  controls.inputs = {Eigen::VectorXd::Zero(2)};
  EXPECT_THROW(rollout(sys, example_state(), controls), DimensionError);
}

TEST(ControlSequence, StackedRoundTrip) {
  Eigen::VectorXd stacked(4);
  stacked << 1.0, 2.0, 3.0, 4.0;
  const auto seq = ControlSequence::from_stacked(stacked, 2);
  ASSERT_EQ(seq.length(), 2);
  EXPECT_EQ(seq.inputs[0], Eigen::Vector2d(1.0, 2.0));
  EXPECT_EQ(seq.inputs[1], Eigen::Vector2d(3.0, 4.0));
  EXPECT_EQ(seq.stacked(), stacked);
}

TEST(FsCLF, QuadraticValueAndGradient) {
  const auto f = testutil::example_fsclf();
  EXPECT_DOUBLE_EQ(eval_V(f, example_state()), 3.0);
  ASSERT_TRUE(static_cast<bool>(f.V_gradient));
  Eigen::Vector3d x(0.3, -0.7, 1.1);
  Eigen::VectorXd grad = f.V_gradient(x);
  Eigen::VectorXd expected = 2.0 * example_P() * x;
  EXPECT_LT((grad - expected).norm(), 1e-12);
  EXPECT_EQ(f.M, 6);
  EXPECT_TRUE(f.decay.is_contraction());
}

TEST(FsCLF, FactoryValidatesItsArguments) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(make_quadratic_fsclf(asym, 0.9, 1), ValidationError);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(make_quadratic_fsclf(indefinite, 0.9, 1), ValidationError);
  const Eigen::MatrixXd P = example_P();
  EXPECT_THROW(make_quadratic_fsclf(P, 1.0, 1), ValidationError);
  EXPECT_THROW(make_quadratic_fsclf(P, -0.1, 1), ValidationError);
  EXPECT_THROW(make_quadratic_fsclf(P, 0.9, 0), ValidationError);
}

TEST(FsCLF, PassthroughUsesTheMeasurementItself) {
  const auto f = make_passthrough_fsclf(MeasurementFunction::euclidean_norm(2),
                                        2, 0.5, 3);
  Eigen::Vector2d x(3.0, 4.0);
  EXPECT_DOUBLE_EQ(eval_V(f, x), 5.0);
  EXPECT_DOUBLE_EQ(f.omega.eval(x), 5.0);
  EXPECT_EQ(f.M, 3);
  EXPECT_THROW(eval_V(f, Eigen::Vector3d(1.0, 2.0, 3.0)), DimensionError);
}

TEST(KBounded, FitsLinearGrowthCoefficients) {
  const auto sys = example_system_nominal();
  const auto omega1 = MeasurementFunction::euclidean_norm(3);
  const auto omega2 = MeasurementFunction::euclidean_norm(1);

  std::mt19937 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> samples;
  for (int k = 0; k < 40; ++k) {
    Eigen::VectorXd x(3), u(1);
    for (int i = 0; i < 3; ++i) x(i) = normal(rng);
    u(0) = normal(rng);
    samples.emplace_back(x, u);
  }
  // Pure-state and pure-input samples pin each coefficient from below.
  samples.emplace_back(Eigen::Vector3d(0.0, 0.0, 1.0),
                       Eigen::VectorXd::Zero(1));
  samples.emplace_back(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(1));

  const auto report = check_K_bounded(sys, omega1, omega2, samples);
  EXPECT_TRUE(report.finite_fit);
  EXPECT_TRUE(report.violating_samples.empty());
  EXPECT_LE(report.worst_violation, 1e-9);
  // The state coefficient is sandwiched by |A e_3| and the spectral norm.
  const double spectral = example_A().jacobiSvd().singularValues()(0);
  EXPECT_NEAR(spectral, 1.9736, 1e-3);
  EXPECT_GE(report.c1, std::sqrt(3.25) - 1e-9);
  EXPECT_LE(report.c1, spectral + 1e-9);
  // The fit must actually hold on every sample.
  for (const auto& [x, u] : samples) {
    const double lhs = omega1.eval(sys.transition(x, u, 0));
    EXPECT_LE(lhs,
              report.c1 * omega1.eval(x) + report.c2 * omega2.eval(u) + 1e-8);
  }
  EXPECT_DOUBLE_EQ(report.kappa1(1.0), report.c1);
  EXPECT_DOUBLE_EQ(report.kappa2(1.0), report.c2);
}

TEST(KBounded, DetectsWhenNoFiniteFitExists) {
  // x+ = x + u measured only through the state: the pure-input sample maps
  // the zero state to a nonzero image while both measurements vanish.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(1, 1);
  const auto sys = make_linear_system(A, B);
  const auto omega1 = MeasurementFunction::euclidean_norm(1);
  const auto omega2 =
      MeasurementFunction::quadratic_form(Eigen::MatrixXd::Zero(1, 1));

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> samples;
  samples.emplace_back(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  const auto report = check_K_bounded(sys, omega1, omega2, samples);
  EXPECT_FALSE(report.finite_fit);
  ASSERT_EQ(report.violating_samples.size(), 1u);
  EXPECT_EQ(report.violating_samples[0], 0);

  EXPECT_THROW(check_K_bounded(sys, omega1, omega2, {}), ValidationError);
}

}  // namespace
}  // namespace fsclf
