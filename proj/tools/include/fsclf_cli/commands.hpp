#pragma once

#include <optional>
#include <string>

namespace fsclf::cli {

/// Values of the shared command-line flags.
struct GlobalOptions {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> seed;
  std::optional<double> tol;
};

struct BoundOptions {
  std::optional<int> M;
  std::optional<double> c;
  std::optional<double> d;
  std::optional<std::string> from_fit;
  std::optional<int> seed;
  std::optional<double> tol;
};

/// Exit codes: 0 success, 1 not certified (verify), 2 validation,
/// 3 infeasible, 4 solver failure, 5 I/O.
int cmd_run(const GlobalOptions& options);
int cmd_compare(const GlobalOptions& options);
int cmd_verify(const GlobalOptions& options);
int cmd_bound(const BoundOptions& options);

/// Maps exceptions thrown by a command to the exit-code contract and prints
/// the diagnostic to stderr.
int dispatch(int (*command)(const GlobalOptions&),
             const GlobalOptions& options);
int dispatch_bound(const BoundOptions& options);

/// Log level from the FSCLF_LOG environment variable: quiet, info (default),
/// or debug.
int log_level();
void log_info(const std::string& line);
void log_debug(const std::string& line);

}  // namespace fsclf::cli
