#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsclf/analysis.hpp"
#include "fsclf/mpc.hpp"
#include "fsclf_cli/scenario.hpp"
#include "json.hpp"

namespace fsclf::cli {

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double value);

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file. Throws IoError on failure.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

/// One row per time step t = 0..T with the exact column set
/// t,x_1..x_n,u_1..u_m,V,solve_status,contraction_residual,solve_iterations.
/// Rows whose input was applied open loop from an earlier solution leave
/// the solve columns empty, as does the final state-only row.
std::string trajectory_csv(const ClosedLoopResult& result, int input_dim);

/// Wide CSV aligning several runs on t: per variant label the columns
/// <label>_x_i, <label>_u_j, <label>_V.
std::string aligned_csv(const std::vector<std::string>& labels,
                        const std::vector<ClosedLoopResult>& results,
                        int input_dim);

nlohmann::ordered_json summary_json(const ScenarioConfig& config,
                                    const VariantConfig& variant,
                                    const ClosedLoopResult& result,
                                    double total_wall_s);

nlohmann::ordered_json comparison_json(
    const ScenarioConfig& config, const std::vector<std::string>& labels,
    const std::vector<ClosedLoopResult>& results,
    const std::vector<double>& wall_times_s);

nlohmann::ordered_json certification_json(const ScenarioConfig& config,
                                          const CertificationReport& report);

/// Labels for a variant list: the algorithm token, suffixed with _h<horizon>
/// when the same algorithm appears more than once.
std::vector<std::string> variant_labels(const std::vector<VariantConfig>& vs);

}  // namespace fsclf::cli
