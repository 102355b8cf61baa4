#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "fsclf/analysis.hpp"
#include "fsclf/mpc.hpp"
#include "fsclf/ocp.hpp"
#include "fsclf/trajectory.hpp"

namespace {

Eigen::MatrixXd example_A() {
  Eigen::MatrixXd A(3, 3);
  A << 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.5;
  return A;
}

Eigen::MatrixXd example_B() {
  Eigen::MatrixXd B(3, 1);
  B << 0.0, 0.0, 1.0;
  return B;
}

Eigen::MatrixXd example_P() {
  Eigen::MatrixXd P(3, 3);
  P << 1.0, 0.0, 0.25, 0.0, 1.0, 0.25, 0.25, 0.25, 1.0;
  return P;
}

Eigen::VectorXd example_state() { return Eigen::Vector3d(-1.0, 1.0, 1.0); }

void BM_ContractiveSolve(benchmark::State& state) {
  fsclf::OcpSpec spec;
  spec.variant = fsclf::Contractive{6};
  spec.system = fsclf::make_linear_system(example_A(), example_B());
  spec.fsclf = fsclf::make_quadratic_fsclf(example_P(), 0.9, 6);
  spec.initial_state = example_state();
  const fsclf::SolverConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsclf::solve_ocp(spec, config));
  }
}
BENCHMARK(BM_ContractiveSolve)->Unit(benchmark::kMicrosecond);

void BM_ShrinkingCycle(benchmark::State& state) {
  const auto sys = fsclf::make_linear_system(example_A(), example_B());
  const auto f = fsclf::make_quadratic_fsclf(example_P(), 0.9, 6);
  fsclf::ClosedLoopConfig config;
  config.algorithm = fsclf::Algorithm::ShrinkingUpdated;
  config.horizon = 6;
  config.total_steps = 6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fsclf::run_shrinking(sys, sys, f, example_state(), 6, config));
  }
}
BENCHMARK(BM_ShrinkingCycle)->Unit(benchmark::kMicrosecond);

void BM_CertifySample(benchmark::State& state) {
  const auto sys = fsclf::make_linear_system(example_A(), example_B());
  const auto f = fsclf::make_quadratic_fsclf(example_P(), 0.9, 3);
  const auto samples = fsclf::level_set_samples(f, 1, 0);
  const fsclf::SolverConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsclf::certify_fsclf(sys, f, samples, config));
  }
}
BENCHMARK(BM_CertifySample)->Unit(benchmark::kMicrosecond);

void BM_RolloutHundredSteps(benchmark::State& state) {
  const auto sys = fsclf::make_linear_system(example_A(), example_B());
  fsclf::ControlSequence controls;
  controls.inputs.assign(100, Eigen::VectorXd::Zero(1));
  // A stable start keeps the rollout finite across all 100 steps.
  const Eigen::VectorXd x0 = Eigen::Vector3d(1.0, 0.0, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsclf::rollout(sys, x0, controls));
  }
}
BENCHMARK(BM_RolloutHundredSteps)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
