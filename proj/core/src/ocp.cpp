#include "fsclf/ocp.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace fsclf {

namespace {

struct Transcription {
  ControlSystem prediction;  // nominal map only
  FsCLF fsclf;
  Eigen::VectorXd xi;
  int horizon = 1;
  // Contraction threshold decay(anchor); empty for the classic variant.
  std::optional<double> threshold;

  bool has_analytic_gradients() const {
    return static_cast<bool>(prediction.jacobian_state) &&
           static_cast<bool>(prediction.jacobian_input) &&
           static_cast<bool>(fsclf.V_gradient);
  }

  std::vector<Eigen::VectorXd> predict(const Eigen::VectorXd& z) const {
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(horizon + 1);
    xs.push_back(xi);
    const int m = prediction.input_dim;
    for (int i = 0; i < horizon; ++i) {
      xs.push_back(prediction.nominal(xs.back(), z.segment(i * m, m)));
    }
    return xs;
  }

  // Gradient over the stacked inputs of a function whose per-state partials
  // are seed(i) for i = 1..horizon (zero seeds may be skipped by callers by
  // passing empty vectors).
  Eigen::VectorXd adjoint(const std::vector<Eigen::VectorXd>& xs,
                          const Eigen::VectorXd& z,
                          const std::vector<Eigen::VectorXd>& seeds) const {
    const int m = prediction.input_dim;
    const int n = prediction.state_dim;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(horizon * m);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (int i = horizon; i >= 1; --i) {
      if (seeds[i].size() > 0) q += seeds[i];
      const Eigen::VectorXd u = z.segment((i - 1) * m, m);
      grad.segment((i - 1) * m, m) =
          prediction.jacobian_input(xs[i - 1], u).transpose() * q;
      if (i > 1) {
        q = prediction.jacobian_state(xs[i - 1], u).transpose() * q;
      }
    }
    return grad;
  }
};

SmoothFunction make_cost(const std::shared_ptr<const Transcription>& tr) {
  SmoothFunction f;
  f.value = [tr](const Eigen::VectorXd& z) {
    const auto xs = tr->predict(z);
    double total = 0.0;
    for (int i = 0; i < tr->horizon; ++i) total += tr->fsclf.V(xs[i]);
    return total;
  };
  if (tr->has_analytic_gradients()) {
    f.gradient = [tr](const Eigen::VectorXd& z) {
      const auto xs = tr->predict(z);
      std::vector<Eigen::VectorXd> seeds(tr->horizon + 1);
      for (int i = 1; i < tr->horizon; ++i) {
        seeds[i] = tr->fsclf.V_gradient(xs[i]);
      }
      return tr->adjoint(xs, z, seeds);
    };
  }
  return f;
}

SmoothFunction make_contraction_constraint(
    const std::shared_ptr<const Transcription>& tr) {
  SmoothFunction g;
  g.value = [tr](const Eigen::VectorXd& z) {
    const auto xs = tr->predict(z);
    return tr->fsclf.V(xs[tr->horizon]) - *tr->threshold;
  };
  if (tr->has_analytic_gradients()) {
    g.gradient = [tr](const Eigen::VectorXd& z) {
      const auto xs = tr->predict(z);
      std::vector<Eigen::VectorXd> seeds(tr->horizon + 1);
      seeds[tr->horizon] = tr->fsclf.V_gradient(xs[tr->horizon]);
      return tr->adjoint(xs, z, seeds);
    };
  }
  return g;
}

// Componentwise state box constraints for predicted steps 1..horizon.
void append_state_box_constraints(const std::shared_ptr<const Transcription>& tr,
                                  NlpProblem& problem) {
  if (!tr->prediction.state_set.is_box()) return;
  const int n = tr->prediction.state_dim;
  for (int step = 1; step <= tr->horizon; ++step) {
    for (int k = 0; k < n; ++k) {
      for (int side = 0; side < 2; ++side) {
        const double bound = side == 0 ? tr->prediction.state_set.lower()(k)
                                       : tr->prediction.state_set.upper()(k);
        if (!std::isfinite(bound)) continue;
        SmoothFunction g;
        const double sign = side == 0 ? -1.0 : 1.0;
        g.value = [tr, step, k, bound, sign](const Eigen::VectorXd& z) {
          const auto xs = tr->predict(z);
          return sign * (xs[step](k) - bound);
        };
        if (tr->prediction.jacobian_state && tr->prediction.jacobian_input) {
          g.gradient = [tr, step, k, sign](const Eigen::VectorXd& z) {
            const auto xs = tr->predict(z);
            std::vector<Eigen::VectorXd> seeds(tr->horizon + 1);
            Eigen::VectorXd seed = Eigen::VectorXd::Zero(tr->prediction.state_dim);
            seed(k) = sign;
            seeds[step] = std::move(seed);
            return tr->adjoint(xs, z, seeds);
          };
        }
        problem.inequality_constraints.push_back(std::move(g));
      }
    }
  }
}

std::shared_ptr<const Transcription> make_transcription(
    const OcpSpec& spec, int horizon, std::optional<double> threshold) {
  if (spec.initial_state.size() != spec.system.state_dim) {
    throw DimensionError("initial state dimension does not match the system");
  }
  if (spec.fsclf.state_dim != spec.system.state_dim) {
    throw DimensionError("fs-CLF dimension does not match the system");
  }
  if (!spec.system.state_set.contains(spec.initial_state)) {
    throw ValidationError("initial state lies outside the state set");
  }
  auto tr = std::make_shared<Transcription>();
  tr->prediction = spec.system.without_disturbance();
  tr->fsclf = spec.fsclf;
  tr->xi = spec.initial_state;
  tr->horizon = horizon;
  tr->threshold = threshold;
  return tr;
}

NlpProblem assemble(const std::shared_ptr<const Transcription>& tr) {
  NlpProblem problem;
  problem.dim = tr->horizon * tr->prediction.input_dim;
  problem.cost = make_cost(tr);
  if (tr->threshold) {
    problem.inequality_constraints.push_back(make_contraction_constraint(tr));
  }
  append_state_box_constraints(tr, problem);
  if (tr->prediction.input_set.is_box()) {
    const int m = tr->prediction.input_dim;
    Eigen::VectorXd lower(problem.dim), upper(problem.dim);
    for (int i = 0; i < tr->horizon; ++i) {
      lower.segment(i * m, m) = tr->prediction.input_set.lower();
      upper.segment(i * m, m) = tr->prediction.input_set.upper();
    }
    problem.box = ConstraintSet::box(std::move(lower), std::move(upper));
  }
  return problem;
}

int horizon_of(const OcpSpec& spec) {
  if (const auto* c = std::get_if<Contractive>(&spec.variant)) return c->M;
  if (const auto* s = std::get_if<Shrinking>(&spec.variant)) return s->horizon;
  return std::get<Classic>(spec.variant).N;
}

}  // namespace

OcpInfeasibleError::OcpInfeasibleError(const std::string& message,
                                       OcpSolution best)
    : Error(message),
      best_(std::make_shared<const OcpSolution>(std::move(best))) {}

NlpProblem build_ocp1(const OcpSpec& spec) {
  const auto* variant = std::get_if<Contractive>(&spec.variant);
  if (variant == nullptr) {
    throw ValidationError("build_ocp1 requires the contractive variant");
  }
  if (variant->M != spec.fsclf.M) {
    throw ValidationError("contractive horizon must equal the fs-CLF step count");
  }
  if (variant->M < 1) throw ValidationError("horizon must be >= 1");
  auto tr = make_transcription(
      spec, variant->M,
      spec.fsclf.decay.eval(spec.fsclf.V(spec.initial_state)));
  return assemble(tr);
}

NlpProblem build_ocp2(const OcpSpec& spec) {
  const auto* variant = std::get_if<Shrinking>(&spec.variant);
  if (variant == nullptr) {
    throw ValidationError("build_ocp2 requires the shrinking variant");
  }
  if (variant->horizon < 1 || variant->horizon > spec.fsclf.M) {
    throw ValidationError("shrinking horizon must lie in [1, M]");
  }
  if (!(variant->anchor_value >= 0.0)) {
    throw ValidationError("anchor value must be >= 0");
  }
  auto tr = make_transcription(spec, variant->horizon,
                               spec.fsclf.decay.eval(variant->anchor_value));
  return assemble(tr);
}

NlpProblem build_ocp3(const OcpSpec& spec) {
  const auto* variant = std::get_if<Classic>(&spec.variant);
  if (variant == nullptr) {
    throw ValidationError("build_ocp3 requires the classic variant");
  }
  if (variant->N < 1) throw ValidationError("horizon must be >= 1");
  auto tr = make_transcription(spec, variant->N, std::nullopt);
  return assemble(tr);
}

OcpSolution solve_ocp(const OcpSpec& spec, const SolverConfig& config,
                      const std::optional<ControlSequence>& warm_start) {
  NlpProblem problem;
  std::optional<double> threshold;
  if (std::holds_alternative<Contractive>(spec.variant)) {
    problem = build_ocp1(spec);
    threshold = spec.fsclf.decay.eval(spec.fsclf.V(spec.initial_state));
  } else if (std::holds_alternative<Shrinking>(spec.variant)) {
    problem = build_ocp2(spec);
    threshold =
        spec.fsclf.decay.eval(std::get<Shrinking>(spec.variant).anchor_value);
  } else {
    problem = build_ocp3(spec);
  }

  const int horizon = horizon_of(spec);
  const int m = spec.system.input_dim;
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(horizon * m);
  if (warm_start) {
    if (warm_start->length() != horizon) {
      throw DimensionError("warm start length does not match the horizon");
    }
    guess = warm_start->stacked();
  }

  const SolverResult res = solve(problem, config, guess);

  OcpSolution sol;
  sol.controls = ControlSequence::from_stacked(res.solution, m);
  sol.predicted = rollout(spec.system.without_disturbance(), spec.initial_state,
                          sol.controls, spec.initial_time);
  sol.cost = res.cost_value;
  sol.solver_status = res.status;
  sol.iterations = res.iterations;
  sol.max_residual = res.max_residual;
  if (threshold) {
    sol.contraction_residual = std::max(
        0.0, spec.fsclf.V(sol.predicted.states.back()) - *threshold);
  }

  if (res.max_residual > config.feasibility_tol) {
    throw OcpInfeasibleError(
        "optimal control problem infeasible, best residual " +
            std::to_string(res.max_residual),
        std::move(sol));
  }
  return sol;
}

double optimal_value_VN(const ControlSystem& system, const FsCLF& fsclf,
                        const Eigen::VectorXd& xi, int N,
                        const SolverConfig& config) {
  OcpSpec spec{Classic{N}, system, fsclf, xi, 0};
  return solve_ocp(spec, config).cost;
}

}  // namespace fsclf
