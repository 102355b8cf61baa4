#include <string>

#include "CLI11.hpp"
#include "fsclf_cli/commands.hpp"

namespace {

void add_common_flags(CLI::App* sub, fsclf::cli::GlobalOptions& options,
                      bool config_required) {
  auto* config = sub->add_option(
      "--config", options.config,
      "Scenario config file, or a builtin name (paper-nominal, "
      "paper-perturbed)");
  if (config_required) config->required();
  sub->add_option("--out", options.out_dir,
                  "Output directory (default: config's output.directory, "
                  "else the working directory)");
  sub->add_option("--seed", options.seed, "Override the config's sample seed");
  sub->add_option("--tol", options.tol,
                  "Override solver tolerances: feasibility = TOL, "
                  "optimality = TOL/100");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app(
      "Finite-step Lyapunov MPC toolkit: closed-loop experiment runner, "
      "algorithm comparison, decay certification, and horizon bounds");
  app.require_subcommand(1);

  fsclf::cli::GlobalOptions run_options;
  CLI::App* run = app.add_subcommand(
      "run", "Run one closed loop and write trajectory.csv + summary.json");
  add_common_flags(run, run_options, true);

  fsclf::cli::GlobalOptions compare_options;
  CLI::App* compare = app.add_subcommand(
      "compare",
      "Run every variant in the config and write per-variant CSVs, "
      "aligned.csv, and comparison.json");
  add_common_flags(compare, compare_options, true);

  fsclf::cli::GlobalOptions verify_options;
  CLI::App* verify = app.add_subcommand(
      "verify",
      "Certify the configured V by solving the contractive problem from "
      "level-set samples; writes certification.json");
  add_common_flags(verify, verify_options, true);

  fsclf::cli::BoundOptions bound_options;
  CLI::App* bound = app.add_subcommand(
      "bound",
      "Print the minimal classic horizon as JSON, from --M/--c/--d or from "
      "constants fitted on a config");
  bound->add_option("--M", bound_options.M, "Cycle length M");
  bound->add_option("--c", bound_options.c, "Contraction factor c in [0,1)");
  bound->add_option("--d", bound_options.d, "Transient growth factor d > 0");
  bound->add_option("--from-fit", bound_options.from_fit,
                    "Fit c and d on this scenario config instead");
  bound->add_option("--seed", bound_options.seed,
                    "Override the config's sample seed (with --from-fit)");
  bound->add_option("--tol", bound_options.tol,
                    "Override solver tolerances (with --from-fit)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed()) return fsclf::cli::dispatch(fsclf::cli::cmd_run, run_options);
  if (compare->parsed()) {
    return fsclf::cli::dispatch(fsclf::cli::cmd_compare, compare_options);
  }
  if (verify->parsed()) {
    return fsclf::cli::dispatch(fsclf::cli::cmd_verify, verify_options);
  }
  return fsclf::cli::dispatch_bound(bound_options);
}
