#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "example_fixtures.hpp"
#include "fsclf/errors.hpp"
#include "fsclf/ocp.hpp"
#include "fsclf/solver.hpp"

namespace fsclf {
namespace {

using testutil::example_fsclf;
using testutil::example_state;
using testutil::example_system_nominal;

OcpSpec contractive_spec(int M = 6) {
  OcpSpec spec;
  spec.variant = Contractive{M};
  spec.system = example_system_nominal();
  spec.fsclf = example_fsclf(M);
  spec.initial_state = example_state();
  return spec;
}

double relative_gradient_error(const SmoothFunction& f,
                               const Eigen::VectorXd& z) {
  const Eigen::VectorXd analytic = f.gradient(z);
  const Eigen::VectorXd numeric = finite_diff_gradient(f.value, z, 1e-6);
  const double scale = std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
  return (analytic - numeric).lpNorm<Eigen::Infinity>() / scale;
}

TEST(Ocp, AnalyticGradientsMatchFiniteDifferences) {
  const OcpSpec spec = contractive_spec();
  const NlpProblem problem = build_ocp1(spec);
  ASSERT_TRUE(static_cast<bool>(problem.cost.gradient));

  std::mt19937 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd z(problem.dim);
    for (int i = 0; i < problem.dim; ++i) z(i) = normal(rng);
    EXPECT_LE(relative_gradient_error(problem.cost, z), 1e-4);
    for (const auto& g : problem.inequality_constraints) {
      ASSERT_TRUE(static_cast<bool>(g.gradient));
      EXPECT_LE(relative_gradient_error(g, z), 1e-4);
    }
  }
}

TEST(Ocp, StateBoxTranscriptionKeepsGradientAgreement) {
  OcpSpec spec = contractive_spec(3);
  spec.system = make_linear_system(
      testutil::example_A(), testutil::example_B(), std::nullopt,
      ConstraintSet::box(Eigen::Vector3d::Constant(-10.0),
                         Eigen::Vector3d::Constant(10.0)),
      ConstraintSet::unbounded(1));
  const NlpProblem problem = build_ocp1(spec);
  // Contraction constraint plus two bounds per state component per step.
  EXPECT_EQ(problem.inequality_constraints.size(), 1u + 2u * 3u * 3u);

  std::mt19937 rng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd z(problem.dim);
    for (int i = 0; i < problem.dim; ++i) z(i) = normal(rng);
    for (const auto& g : problem.inequality_constraints) {
      EXPECT_LE(relative_gradient_error(g, z), 1e-4);
    }
  }
}

TEST(Ocp, ContractiveSolveSatisfiesTheDecayConstraint) {
  const OcpSpec spec = contractive_spec();
  const auto sol = solve_ocp(spec, SolverConfig{});
  EXPECT_EQ(sol.solver_status, SolveStatus::optimal);
  EXPECT_LE(sol.max_residual, 1e-6);
  ASSERT_EQ(sol.controls.length(), 6);
  ASSERT_EQ(sol.predicted.states.size(), 7u);
  EXPECT_EQ(sol.predicted.states.front(), example_state());

  const FsCLF f = example_fsclf();
  EXPECT_LE(eval_V(f, sol.predicted.states.back()), 0.9 * 3.0 + 1e-6);
  // The reported cost is the sum of V over the first M predicted states.
  double stage_sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    stage_sum += eval_V(f, sol.predicted.states[static_cast<std::size_t>(i)]);
  }
  EXPECT_NEAR(sol.cost, stage_sum, 1e-9);
  EXPECT_GE(sol.cost, 3.0);
  const double recomputed_residual =
      std::max(0.0, eval_V(f, sol.predicted.states.back()) - 0.9 * 3.0);
  EXPECT_NEAR(sol.contraction_residual, recomputed_residual, 1e-12);
}

TEST(Ocp, TruncatedTailStaysFeasibleForTheShrinkingProblem) {
  const OcpSpec full = contractive_spec();
  const auto sol = solve_ocp(full, SolverConfig{});

  OcpSpec tail_spec;
  tail_spec.variant = Shrinking{5, 3.0};
  tail_spec.system = full.system;
  tail_spec.fsclf = full.fsclf;
  tail_spec.initial_state = sol.predicted.states[1];
  tail_spec.initial_time = 1;
  const NlpProblem tail_problem = build_ocp2(tail_spec);

  ControlSequence tail;
  tail.inputs.assign(sol.controls.inputs.begin() + 1,
                     sol.controls.inputs.end());
  const Eigen::VectorXd z = tail.stacked();
  ASSERT_EQ(z.size(), tail_problem.dim);
  for (const auto& g : tail_problem.inequality_constraints) {
    EXPECT_LE(g.value(z), 1e-6);
  }

  // Re-solving from the tail must not find anything meaningfully better,
  // and the optimizer must accept the warm start as feasible.
  const double tail_cost = tail_problem.cost.value(z);
  const auto resolved = solve_ocp(tail_spec, SolverConfig{}, tail);
  EXPECT_LE(resolved.cost, tail_cost + 1e-8);
  EXPECT_LE(resolved.max_residual, 1e-6);
}

TEST(Ocp, ShrinkingAtCycleStartEqualsTheContractiveProblem) {
  const OcpSpec full = contractive_spec();
  OcpSpec stage0;
  stage0.variant = Shrinking{6, 3.0};
  stage0.system = full.system;
  stage0.fsclf = full.fsclf;
  stage0.initial_state = full.initial_state;

  const auto a = solve_ocp(full, SolverConfig{});
  const auto b = solve_ocp(stage0, SolverConfig{});
  ASSERT_EQ(a.controls.length(), b.controls.length());
  EXPECT_LE((a.controls.stacked() - b.controls.stacked())
                .lpNorm<Eigen::Infinity>(),
            1e-9);
}

TEST(Ocp, ClassicSolveHasNoContractionResidual) {
  OcpSpec spec;
  spec.variant = Classic{6};
  spec.system = example_system_nominal();
  spec.fsclf = example_fsclf();
  spec.initial_state = example_state();
  const auto sol = solve_ocp(spec, SolverConfig{});
  EXPECT_EQ(sol.solver_status, SolveStatus::optimal);
  EXPECT_DOUBLE_EQ(sol.contraction_residual, 0.0);
  EXPECT_GE(sol.cost, 3.0);
}

TEST(Ocp, ValueFunctionSweepMatchesIndependentValues) {
  const auto sys = example_system_nominal();
  const FsCLF f = example_fsclf();
  const SolverConfig config;
  const std::vector<double> expected = {3.0,     6.75,    11.3871, 16.6771,
                                        18.5875, 18.8709, 18.9022, 18.9104};
  // The one-step value is the stage cost at the initial state itself.
  EXPECT_DOUBLE_EQ(optimal_value_VN(sys, f, example_state(), 1, config), 3.0);
  for (int N = 1; N <= 8; ++N) {
    const double v = optimal_value_VN(sys, f, example_state(), N, config);
    EXPECT_NEAR(v, expected[static_cast<std::size_t>(N - 1)],
                1e-3 * expected[static_cast<std::size_t>(N - 1)] + 1e-6)
        << "N=" << N;
  }
}

TEST(Ocp, ValueFunctionIsNondecreasingInTheHorizon) {
  const auto sys = example_system_nominal();
  const FsCLF f = example_fsclf();
  const SolverConfig config;
  std::mt19937 rng(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = normal(rng);
    double previous = 0.0;
    for (int N = 1; N <= 8; ++N) {
      const double v = optimal_value_VN(sys, f, x, N, config);
      EXPECT_GE(v, previous - 1e-7) << "trial " << trial << " N=" << N;
      previous = v;
    }
  }
}

TEST(Ocp, WarmStartNeverWorsensTheSolution) {
  const OcpSpec spec = contractive_spec();
  const auto cold = solve_ocp(spec, SolverConfig{});
  const auto warm = solve_ocp(spec, SolverConfig{}, cold.controls);
  EXPECT_LE(warm.cost, cold.cost + 1e-8);
  EXPECT_LE(warm.max_residual, 1e-6);
}

TEST(Ocp, BuildersRejectMismatchedSpecs) {
  OcpSpec spec = contractive_spec();
  spec.variant = Classic{6};
  EXPECT_THROW(build_ocp1(spec), ValidationError);

  OcpSpec boxed = contractive_spec();
  boxed.system = make_linear_system(
      testutil::example_A(), testutil::example_B(), std::nullopt,
      ConstraintSet::box(Eigen::Vector3d::Constant(-0.5),
                         Eigen::Vector3d::Constant(0.5)),
      ConstraintSet::unbounded(1));
  // The example initial state lies outside the state box.
  EXPECT_THROW(build_ocp1(boxed), ValidationError);
}

TEST(Ocp, ForcedZeroInputMakesTheProblemInfeasible) {
  OcpSpec spec = contractive_spec(1);
  spec.fsclf = example_fsclf(1);
  spec.system = make_linear_system(
      testutil::example_A(), testutil::example_B(), std::nullopt,
      ConstraintSet::unbounded(3),
      ConstraintSet::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)));
  try {
    solve_ocp(spec, SolverConfig{});
    FAIL() << "expected OcpInfeasibleError";
  } catch (const OcpInfeasibleError& err) {
    EXPECT_GT(err.best().max_residual, 1e-3);
    EXPECT_EQ(err.best().controls.length(), 1);
  }
}

}  // namespace
}  // namespace fsclf
