#include "fsclf_cli/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <vector>

#include "fsclf/analysis.hpp"
#include "fsclf/errors.hpp"
#include "fsclf/ocp.hpp"
#include "fsclf_cli/outputs.hpp"
#include "fsclf_cli/scenario.hpp"
#include "json.hpp"

namespace fsclf::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_out_dir(const ScenarioConfig& config,
                         const std::optional<std::string>& cli_out) {
  const std::string dir = cli_out    ? *cli_out
                          : config.output_directory ? *config.output_directory
                                                    : std::string(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir + "'");
  }
  return fs::path(dir);
}

ScenarioConfig load_with_overrides(const std::string& config_path,
                                   const std::optional<int>& seed) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

std::string steps_preview(const std::vector<int>& steps) {
  std::string out = "[";
  for (std::size_t i = 0; i < steps.size() && i < 12; ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(steps[i]);
  }
  if (steps.size() > 12) out += ", ...";
  out += "]";
  return out;
}

int finish_loop_command(const std::vector<int>& infeasible_steps) {
  if (infeasible_steps.empty()) return 0;
  std::cerr << "[fsclf] " << infeasible_steps.size()
            << " step(s) used a least-violation input: "
            << steps_preview(infeasible_steps) << "\n";
  return 3;
}

}  // namespace

int log_level() {
  const char* env = std::getenv("FSCLF_LOG");
  if (env == nullptr) return 1;
  const std::string value(env);
  if (value == "quiet") return 0;
  if (value == "debug") return 2;
  return 1;
}

void log_info(const std::string& line) {
  if (log_level() >= 1) std::cerr << "[fsclf] " << line << "\n";
}

void log_debug(const std::string& line) {
  if (log_level() >= 2) std::cerr << "[fsclf] " << line << "\n";
}

int cmd_run(const GlobalOptions& options) {
  const ScenarioConfig cfg = load_with_overrides(options.config, options.seed);
  const fs::path out_dir = prepare_out_dir(cfg, options.out_dir);
  const SolverConfig solver = make_solver_config(cfg, options.tol);
  const VariantConfig variant{cfg.algorithm, cfg.horizon};
  const ClosedLoopConfig loop = make_closed_loop_config(cfg, variant, solver);

  log_info("running " + cfg.name + " with " +
           algorithm_token(variant.algorithm) + ", horizon " +
           std::to_string(variant.horizon) + ", T=" +
           std::to_string(cfg.total_steps));
  const auto start = Clock::now();
  const ClosedLoopResult result =
      run_closed_loop(make_true_system(cfg), make_nominal_system(cfg),
                      make_fsclf(cfg), cfg.initial_state, loop);
  const double wall_s = seconds_since(start);

  write_file_atomic(out_dir / "trajectory.csv",
                    trajectory_csv(result, static_cast<int>(cfg.B.cols())));
  write_file_atomic(out_dir / "summary.json",
                    summary_json(cfg, variant, result, wall_s).dump(2) + "\n");
  log_info("wrote " + (out_dir / "trajectory.csv").string() + " and " +
           (out_dir / "summary.json").string());
  return finish_loop_command(result.infeasible_steps);
}

int cmd_compare(const GlobalOptions& options) {
  const ScenarioConfig cfg = load_with_overrides(options.config, options.seed);
  if (cfg.variants.size() < 2) {
    throw ValidationError("variants: compare needs at least 2 variants");
  }
  for (std::size_t i = 0; i < cfg.variants.size(); ++i) {
    const VariantConfig& v = cfg.variants[i];
    if (v.algorithm != Algorithm::Classic && v.horizon != cfg.M) {
      throw ValidationError("variants[" + std::to_string(i) +
                            "].horizon: contractive algorithms require "
                            "horizon == M");
    }
  }
  const fs::path out_dir = prepare_out_dir(cfg, options.out_dir);
  const SolverConfig solver = make_solver_config(cfg, options.tol);
  const std::vector<std::string> labels = variant_labels(cfg.variants);

  std::vector<ClosedLoopResult> results;
  std::vector<double> wall_times;
  std::vector<int> merged_infeasible;
  for (std::size_t i = 0; i < cfg.variants.size(); ++i) {
    const VariantConfig& variant = cfg.variants[i];
    const ClosedLoopConfig loop =
        make_closed_loop_config(cfg, variant, solver);
    log_info("running variant " + labels[i]);
    const auto start = Clock::now();
    results.push_back(run_closed_loop(make_true_system(cfg),
                                      make_nominal_system(cfg),
                                      make_fsclf(cfg), cfg.initial_state,
                                      loop));
    wall_times.push_back(seconds_since(start));
    merged_infeasible.insert(merged_infeasible.end(),
                             results.back().infeasible_steps.begin(),
                             results.back().infeasible_steps.end());
  }

  const int input_dim = static_cast<int>(cfg.B.cols());
  for (std::size_t i = 0; i < results.size(); ++i) {
    write_file_atomic(out_dir / ("trajectory_" + labels[i] + ".csv"),
                      trajectory_csv(results[i], input_dim));
  }
  write_file_atomic(out_dir / "aligned.csv",
                    aligned_csv(labels, results, input_dim));
  write_file_atomic(
      out_dir / "comparison.json",
      comparison_json(cfg, labels, results, wall_times).dump(2) + "\n");
  log_info("wrote comparison outputs to " + out_dir.string());
  return finish_loop_command(merged_infeasible);
}

int cmd_verify(const GlobalOptions& options) {
  const ScenarioConfig cfg = load_with_overrides(options.config, options.seed);
  const fs::path out_dir = prepare_out_dir(cfg, options.out_dir);
  const SolverConfig solver = make_solver_config(cfg, options.tol);
  const FsCLF fsclf = make_fsclf(cfg);

  log_info("certifying " + cfg.name + " with M=" + std::to_string(cfg.M) +
           " over " + std::to_string(cfg.samples) + " level-set samples");
  const std::vector<Eigen::VectorXd> samples =
      level_set_samples(fsclf, cfg.samples, cfg.seed);
  const CertificationReport report =
      certify_fsclf(make_nominal_system(cfg), fsclf, samples, solver);

  write_file_atomic(out_dir / "certification.json",
                    certification_json(cfg, report).dump(2) + "\n");
  std::cout << (report.certified ? "certified" : "not certified") << ": "
            << report.feasible_count << "/" << report.samples_tested
            << " samples feasible, worst ratio "
            << format_double(report.max_ratio) << "\n";
  return report.certified ? 0 : 1;
}

int cmd_bound(const BoundOptions& options) {
  const bool manual =
      options.M.has_value() || options.c.has_value() || options.d.has_value();
  if (manual == options.from_fit.has_value()) {
    throw ValidationError(
        "bound needs either all of --M/--c/--d or --from-fit CONFIG");
  }

  HorizonBoundInputs inputs;
  nlohmann::ordered_json j;
  if (manual) {
    if (!options.M || !options.c || !options.d) {
      throw ValidationError("bound needs all of --M, --c, and --d");
    }
    inputs = HorizonBoundInputs{*options.c, *options.d, *options.M};
  } else {
    const ScenarioConfig cfg =
        load_with_overrides(*options.from_fit, options.seed);
    const SolverConfig solver = make_solver_config(cfg, options.tol);
    const FsCLF fsclf = make_fsclf(cfg);
    const std::vector<Eigen::VectorXd> samples =
        level_set_samples(fsclf, cfg.samples, cfg.seed);
    log_info("fitting transient constants over " +
             std::to_string(cfg.samples) + " samples");
    const TransientConstants fit = fit_transient_constants(
        make_nominal_system(cfg), fsclf, samples, solver);
    inputs = HorizonBoundInputs{fit.c, fit.d, cfg.M};
    j["c"] = fit.c;
    j["d"] = fit.d;
    j["M"] = cfg.M;
  }
  const double gamma = inputs.gamma();
  j["gamma"] = gamma;
  j["N_min"] = horizon_bound(gamma);
  std::cout << j.dump(2) << "\n";
  return 0;
}

namespace {

int map_exceptions(const std::function<int()>& body) {
  try {
    return body();
  } catch (const OcpInfeasibleError& e) {
    std::cerr << "[fsclf] infeasible: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "[fsclf] validation error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "[fsclf] validation error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "[fsclf] I/O error: " << e.what() << "\n";
    return 5;
  } catch (const NonFiniteError& e) {
    std::cerr << "[fsclf] solver failure: " << e.what() << "\n";
    return 4;
  } catch (const SolverError& e) {
    std::cerr << "[fsclf] solver failure: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "[fsclf] validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "[fsclf] error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int dispatch(int (*command)(const GlobalOptions&),
             const GlobalOptions& options) {
  return map_exceptions([&] { return command(options); });
}

int dispatch_bound(const BoundOptions& options) {
  return map_exceptions([&] { return cmd_bound(options); });
}

}  // namespace fsclf::cli
