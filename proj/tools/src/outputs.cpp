#include "fsclf_cli/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <system_error>

#include "fsclf/errors.hpp"

namespace fsclf::cli {

namespace {

using nlohmann::ordered_json;

std::string component_key(const char* prefix, int index) {
  return std::string(prefix) + "_" + std::to_string(index + 1);
}

void append_state_input_v(std::string& out, const ClosedLoopResult& result,
                          int t, int T, int input_dim) {
  const Eigen::VectorXd& x =
      result.trajectory.states[static_cast<std::size_t>(t)];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out += ',';
    out += format_double(x(i));
  }
  if (t < T) {
    const Eigen::VectorXd& u =
        result.applied_inputs.inputs[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      out += ',';
      out += format_double(u(i));
    }
  } else {
    for (int i = 0; i < input_dim; ++i) out += ',';
  }
  out += ',';
  out += format_double(result.v_values[static_cast<std::size_t>(t)]);
}

ordered_json deviation_map(const Trajectory& traj, int window_start) {
  ordered_json dev;
  const int n = static_cast<int>(traj.states.front().size());
  for (int c = 0; c < n; ++c) {
    dev[component_key("x", c)] =
        max_deviation_post_transient(traj, c, window_start);
  }
  return dev;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + temp.string() + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("write to '" + temp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw IoError("cannot rename temp file onto '" + path.string() + "'");
  }
}

std::string trajectory_csv(const ClosedLoopResult& result, int input_dim) {
  const int T = result.trajectory.length();
  const int n = static_cast<int>(result.trajectory.states.front().size());
  std::string out = "t";
  for (int i = 0; i < n; ++i) out += "," + component_key("x", i);
  for (int i = 0; i < input_dim; ++i) out += "," + component_key("u", i);
  out += ",V,solve_status,contraction_residual,solve_iterations\n";

  for (int t = 0; t <= T; ++t) {
    out += std::to_string(t);
    append_state_input_v(out, result, t, T, input_dim);
    const int idx =
        t < T ? result.solve_index_for_step[static_cast<std::size_t>(t)] : -1;
    if (idx >= 0) {
      const SolveDiagnostic& diag =
          result.diagnostics[static_cast<std::size_t>(idx)];
      out += ',';
      out += to_string(diag.status);
      out += ',';
      out += format_double(diag.contraction_residual);
      out += ',';
      out += std::to_string(diag.iterations.inner_total);
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

std::string aligned_csv(const std::vector<std::string>& labels,
                        const std::vector<ClosedLoopResult>& results,
                        int input_dim) {
  const int T = results.front().trajectory.length();
  const int n =
      static_cast<int>(results.front().trajectory.states.front().size());
  std::string out = "t";
  for (const std::string& label : labels) {
    for (int i = 0; i < n; ++i) out += "," + label + "_" + component_key("x", i);
    for (int i = 0; i < input_dim; ++i) {
      out += "," + label + "_" + component_key("u", i);
    }
    out += "," + label + "_V";
  }
  out += '\n';
  for (int t = 0; t <= T; ++t) {
    out += std::to_string(t);
    for (const ClosedLoopResult& result : results) {
      append_state_input_v(out, result, t, T, input_dim);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json summary_json(const ScenarioConfig& config,
                                    const VariantConfig& variant,
                                    const ClosedLoopResult& result,
                                    double total_wall_s) {
  ordered_json j;
  j["schema"] = 1;
  j["scenario"] = config.name;
  j["algorithm"] = algorithm_token(variant.algorithm);
  j["horizon"] = variant.horizon;
  j["total_steps"] = config.total_steps;
  j["window_start"] = config.window_start;
  j["final_V"] = result.v_values.back();
  j["cycle_anchors"] = result.cycle_anchors;
  j["max_deviation_post_transient"] =
      deviation_map(result.trajectory, config.window_start);
  j["infeasible_steps"] = result.infeasible_steps;
  j["solve_count"] = result.diagnostics.size();

  std::map<std::string, int> status_counts;
  int outer_total = 0;
  int inner_total = 0;
  double solve_total_s = 0.0;
  double solve_max_s = 0.0;
  for (const SolveDiagnostic& diag : result.diagnostics) {
    ++status_counts[to_string(diag.status)];
    outer_total += diag.iterations.outer;
    inner_total += diag.iterations.inner_total;
    solve_total_s += diag.wall_time_s;
    solve_max_s = std::max(solve_max_s, diag.wall_time_s);
  }
  j["status_counts"] = status_counts;
  j["iterations"] =
      ordered_json{{"outer_total", outer_total}, {"inner_total", inner_total}};
  j["wall_time"] = ordered_json{{"total_s", total_wall_s},
                                {"solve_total_s", solve_total_s},
                                {"solve_max_s", solve_max_s}};
  return j;
}

nlohmann::ordered_json comparison_json(
    const ScenarioConfig& config, const std::vector<std::string>& labels,
    const std::vector<ClosedLoopResult>& results,
    const std::vector<double>& wall_times_s) {
  ordered_json j;
  j["schema"] = 1;
  j["scenario"] = config.name;
  j["total_steps"] = config.total_steps;
  j["window_start"] = config.window_start;
  j["variants"] = labels;

  ordered_json distances;
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      double sup = 0.0;
      const auto& sa = results[a].trajectory.states;
      const auto& sb = results[b].trajectory.states;
      for (std::size_t t = 0; t < sa.size(); ++t) {
        sup = std::max(sup, (sa[t] - sb[t]).lpNorm<Eigen::Infinity>());
      }
      distances[labels[a] + "|" + labels[b]] = sup;
    }
  }
  j["pairwise_sup_distance"] = std::move(distances);

  ordered_json deviations;
  for (std::size_t i = 0; i < results.size(); ++i) {
    deviations[labels[i]] =
        deviation_map(results[i].trajectory, config.window_start);
  }
  j["deviation"] = deviations;

  ordered_json reductions;
  const ordered_json& first = deviations[labels.front()];
  for (std::size_t i = 1; i < results.size(); ++i) {
    ordered_json per_component;
    for (auto it = first.begin(); it != first.end(); ++it) {
      const double base = it.value().get<double>();
      if (base > 0.0) {
        const double other = deviations[labels[i]][it.key()].get<double>();
        per_component[it.key()] = 100.0 * (base - other) / base;
      }
    }
    reductions[labels[i]] = std::move(per_component);
  }
  j["reduction_pct_vs_first"] = std::move(reductions);

  ordered_json infeasible;
  ordered_json walls;
  for (std::size_t i = 0; i < results.size(); ++i) {
    infeasible[labels[i]] = results[i].infeasible_steps;
    walls[labels[i]] = wall_times_s[i];
  }
  j["infeasible_steps"] = std::move(infeasible);
  j["wall_time_s"] = std::move(walls);
  return j;
}

nlohmann::ordered_json certification_json(const ScenarioConfig& config,
                                          const CertificationReport& report) {
  ordered_json j;
  j["schema"] = 1;
  j["scenario"] = config.name;
  j["M"] = config.M;
  j["decay_c"] = config.decay_c;
  j["seed"] = config.seed;
  j["samples_tested"] = report.samples_tested;
  j["feasible_count"] = report.feasible_count;
  j["min_ratio"] = report.min_ratio;
  j["max_ratio"] = report.max_ratio;
  j["worst_residual"] = report.worst_residual;
  j["certified"] = report.certified;
  ordered_json rows = ordered_json::array();
  for (const SampleCertification& s : report.samples) {
    rows.push_back(ordered_json{{"index", s.index},
                                {"feasible", s.feasible},
                                {"ratio", s.ratio},
                                {"residual", s.residual}});
  }
  j["samples"] = std::move(rows);
  return j;
}

std::vector<std::string> variant_labels(const std::vector<VariantConfig>& vs) {
  std::map<std::string, int> algorithm_uses;
  for (const VariantConfig& v : vs) {
    ++algorithm_uses[algorithm_token(v.algorithm)];
  }
  std::vector<std::string> labels;
  labels.reserve(vs.size());
  std::map<std::string, int> seen;
  for (const VariantConfig& v : vs) {
    std::string label = algorithm_token(v.algorithm);
    if (algorithm_uses[label] > 1) {
      label += "_h" + std::to_string(v.horizon);
    }
    const int repeat = seen[label]++;
    if (repeat > 0) {
      label += "_" + std::to_string(repeat + 1);
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

}  // namespace fsclf::cli
