#include "fsclf_cli/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsclf/errors.hpp"
#include "json.hpp"

namespace fsclf::cli {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

const ordered_json& require(const ordered_json& j, const std::string& key,
                            const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    fail(path.empty() ? key : path + "." + key, "missing field");
  }
  return *it;
}

double as_double(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Eigen::MatrixXd as_matrix(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const ordered_json& row = j[r];
    if (!row.is_array() || row.empty()) {
      fail(path, "row " + std::to_string(r) + " is not a non-empty array");
    }
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      fail(path, "rows have inconsistent lengths");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_double(row[c], path);
    }
  }
  return m;
}

Eigen::VectorXd as_vector(const ordered_json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_double(j[i], path);
  }
  return v;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i));
  }
  return arr;
}

DisturbanceConfig parse_disturbance(const ordered_json& j,
                                    const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  DisturbanceConfig d;
  d.amplitude = as_double(require(j, "amplitude", path), path + ".amplitude");
  d.frequency = as_double(require(j, "frequency", path), path + ".frequency");
  const ordered_json& comps = require(j, "components", path);
  if (!comps.is_array() || comps.empty()) {
    fail(path + ".components", "expected a non-empty array of indices");
  }
  for (const auto& c : comps) {
    d.components.push_back(as_int(c, path + ".components"));
  }
  return d;
}

WarmStartPolicy parse_warm_start(const std::string& token,
                                 const std::string& path) {
  if (token == "shift_previous") return WarmStartPolicy::shift_previous;
  if (token == "zeros") return WarmStartPolicy::zeros;
  fail(path, "unknown warm start policy '" + token +
                 "' (expected shift_previous or zeros)");
}

InfeasibilityPolicy parse_infeasibility(const std::string& token,
                                        const std::string& path) {
  if (token == "halt") return InfeasibilityPolicy::halt;
  if (token == "continue_best") return InfeasibilityPolicy::continue_best;
  fail(path, "unknown infeasibility policy '" + token +
                 "' (expected halt or continue_best)");
}

void overlay_common_fields(ScenarioConfig& cfg, const ordered_json& j,
                           bool has_base);

void apply_system(ScenarioConfig& cfg, const ordered_json& j) {
  if (!j.is_object()) fail("system", "expected an object");
  const bool has_builtin = j.contains("builtin");
  const bool has_linear = j.contains("linear");
  if (has_builtin == has_linear) {
    fail("system", "expected exactly one of 'builtin' or 'linear'");
  }
  if (has_builtin) {
    const std::string name = as_string(j.at("builtin"), "system.builtin");
    const ScenarioConfig base = builtin_scenario(name);
    cfg = base;
    return;
  }
  const ordered_json& lin = j.at("linear");
  cfg.A = as_matrix(require(lin, "A", "system.linear"), "system.linear.A");
  cfg.B = as_matrix(require(lin, "B", "system.linear"), "system.linear.B");
  if (lin.contains("disturbance")) {
    cfg.disturbance =
        parse_disturbance(lin.at("disturbance"), "system.linear.disturbance");
  } else {
    cfg.disturbance.reset();
  }
}

void apply_fsclf(ScenarioConfig& cfg, const ordered_json& j, bool has_base) {
  if (!j.is_object()) fail("fsclf", "expected an object");
  const bool quad = j.contains("quadratic");
  const bool pass = j.contains("omega-passthrough");
  if (quad == pass) {
    fail("fsclf", "expected exactly one of 'quadratic' or 'omega-passthrough'");
  }
  const std::string path = quad ? "fsclf.quadratic" : "fsclf.omega-passthrough";
  const ordered_json& body = quad ? j.at("quadratic") : j.at("omega-passthrough");
  cfg.omega_passthrough = pass;
  // On top of a builtin the body may override a subset of the fields; a
  // standalone config must state them all.
  if (quad) {
    if (body.contains("P")) {
      cfg.P = as_matrix(body.at("P"), path + ".P");
    } else if (!has_base || cfg.P.size() == 0) {
      fail(path + ".P", "missing field");
    }
  } else {
    cfg.P.resize(0, 0);
  }
  if (body.contains("decay_c")) {
    cfg.decay_c = as_double(body.at("decay_c"), path + ".decay_c");
  } else if (!has_base) {
    fail(path + ".decay_c", "missing field");
  }
  if (body.contains("M")) {
    cfg.M = as_int(body.at("M"), path + ".M");
  } else if (!has_base) {
    fail(path + ".M", "missing field");
  }
}

VariantConfig parse_variant(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  VariantConfig v;
  v.algorithm = parse_algorithm_token(
      as_string(require(j, "algorithm", path), path + ".algorithm"));
  v.horizon = as_int(require(j, "horizon", path), path + ".horizon");
  return v;
}

void overlay_common_fields(ScenarioConfig& cfg, const ordered_json& j,
                           bool has_base) {
  if (j.contains("name")) cfg.name = as_string(j.at("name"), "name");
  if (j.contains("fsclf")) apply_fsclf(cfg, j.at("fsclf"), has_base);
  if (j.contains("algorithm")) {
    cfg.algorithm =
        parse_algorithm_token(as_string(j.at("algorithm"), "algorithm"));
  }
  if (j.contains("horizon")) cfg.horizon = as_int(j.at("horizon"), "horizon");
  if (j.contains("variants")) {
    const ordered_json& vs = j.at("variants");
    if (!vs.is_array()) fail("variants", "expected an array");
    cfg.variants.clear();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      cfg.variants.push_back(
          parse_variant(vs[i], "variants[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("initial_state")) {
    cfg.initial_state = as_vector(j.at("initial_state"), "initial_state");
  }
  if (j.contains("total_steps")) {
    cfg.total_steps = as_int(j.at("total_steps"), "total_steps");
  }
  if (j.contains("window_start")) {
    cfg.window_start = as_int(j.at("window_start"), "window_start");
  }
  if (j.contains("solver")) {
    const ordered_json& s = j.at("solver");
    if (!s.is_object()) fail("solver", "expected an object");
    if (s.contains("feasibility_tol")) {
      cfg.solver.feasibility_tol =
          as_double(s.at("feasibility_tol"), "solver.feasibility_tol");
    }
    if (s.contains("optimality_tol")) {
      cfg.solver.optimality_tol =
          as_double(s.at("optimality_tol"), "solver.optimality_tol");
    }
    if (s.contains("max_outer_iters")) {
      cfg.solver.max_outer_iters =
          as_int(s.at("max_outer_iters"), "solver.max_outer_iters");
    }
    if (s.contains("max_inner_iters")) {
      cfg.solver.max_inner_iters =
          as_int(s.at("max_inner_iters"), "solver.max_inner_iters");
    }
    if (s.contains("initial_penalty")) {
      cfg.solver.initial_penalty =
          as_double(s.at("initial_penalty"), "solver.initial_penalty");
    }
    if (s.contains("fd_step")) {
      cfg.solver.fd_step = as_double(s.at("fd_step"), "solver.fd_step");
    }
  }
  if (j.contains("warm_start")) {
    cfg.warm_start =
        parse_warm_start(as_string(j.at("warm_start"), "warm_start"),
                         "warm_start");
  }
  if (j.contains("on_infeasible")) {
    cfg.on_infeasible = parse_infeasibility(
        as_string(j.at("on_infeasible"), "on_infeasible"), "on_infeasible");
  }
  if (j.contains("seed")) cfg.seed = as_int(j.at("seed"), "seed");
  if (j.contains("samples")) cfg.samples = as_int(j.at("samples"), "samples");
  if (j.contains("output")) {
    const ordered_json& o = j.at("output");
    if (!o.is_object()) fail("output", "expected an object");
    if (o.contains("directory")) {
      cfg.output_directory = as_string(o.at("directory"), "output.directory");
    }
  }
}

void validate_scenario(const ScenarioConfig& cfg) {
  const Eigen::Index n = cfg.A.rows();
  if (cfg.A.cols() != n) fail("system.linear.A", "must be square");
  if (!cfg.A.allFinite()) fail("system.linear.A", "entries must be finite");
  if (cfg.B.rows() != n) {
    fail("system.linear.B", "row count must match the state dimension");
  }
  if (cfg.B.cols() < 1) fail("system.linear.B", "needs at least one column");
  if (!cfg.B.allFinite()) fail("system.linear.B", "entries must be finite");
  if (cfg.disturbance) {
    for (int c : cfg.disturbance->components) {
      if (c < 0 || c >= n) {
        fail("system.linear.disturbance.components",
             "index " + std::to_string(c) + " outside the state dimension");
      }
    }
    if (!std::isfinite(cfg.disturbance->amplitude) ||
        !std::isfinite(cfg.disturbance->frequency)) {
      fail("system.linear.disturbance", "amplitude/frequency must be finite");
    }
  }
  const std::string fpath =
      cfg.omega_passthrough ? "fsclf.omega-passthrough" : "fsclf.quadratic";
  if (!(cfg.decay_c >= 0.0 && cfg.decay_c < 1.0)) {
    fail(fpath + ".decay_c", "must lie in [0, 1)");
  }
  if (cfg.M < 1) fail(fpath + ".M", "must be at least 1");
  if (!cfg.omega_passthrough) {
    try {
      make_quadratic_fsclf(cfg.P, cfg.decay_c, cfg.M);
    } catch (const Error& e) {
      fail(fpath + ".P", e.what());
    }
    if (cfg.P.rows() != n) {
      fail(fpath + ".P", "dimension must match the state dimension");
    }
  }
  if (cfg.horizon < 1) fail("horizon", "must be at least 1");
  if (cfg.algorithm != Algorithm::Classic && cfg.horizon != cfg.M) {
    fail("horizon", "contractive algorithms require horizon == M");
  }
  // Variant-vs-M consistency is checked by the compare command, which is the
  // only consumer; a builtin base with an overridden M stays loadable for
  // run and verify.
  for (std::size_t i = 0; i < cfg.variants.size(); ++i) {
    if (cfg.variants[i].horizon < 1) {
      fail("variants[" + std::to_string(i) + "].horizon",
           "must be at least 1");
    }
  }
  if (cfg.initial_state.size() != n) {
    fail("initial_state", "length must match the state dimension");
  }
  if (!cfg.initial_state.allFinite()) {
    fail("initial_state", "entries must be finite");
  }
  if (cfg.total_steps < 1) fail("total_steps", "must be at least 1");
  if (cfg.window_start < 0 || cfg.window_start > cfg.total_steps) {
    fail("window_start", "must lie in [0, total_steps]");
  }
  if (cfg.samples < 1) fail("samples", "must be at least 1");
  if (cfg.solver.feasibility_tol && !(*cfg.solver.feasibility_tol > 0.0)) {
    fail("solver.feasibility_tol", "must be positive");
  }
  if (cfg.solver.optimality_tol && !(*cfg.solver.optimality_tol > 0.0)) {
    fail("solver.optimality_tol", "must be positive");
  }
  if (cfg.solver.max_outer_iters && *cfg.solver.max_outer_iters < 1) {
    fail("solver.max_outer_iters", "must be at least 1");
  }
  if (cfg.solver.max_inner_iters && *cfg.solver.max_inner_iters < 1) {
    fail("solver.max_inner_iters", "must be at least 1");
  }
  if (cfg.solver.initial_penalty && !(*cfg.solver.initial_penalty > 0.0)) {
    fail("solver.initial_penalty", "must be positive");
  }
  if (cfg.solver.fd_step && !(*cfg.solver.fd_step > 0.0)) {
    fail("solver.fd_step", "must be positive");
  }
}

std::optional<DisturbanceSpec> to_disturbance_spec(const ScenarioConfig& cfg) {
  if (!cfg.disturbance) return std::nullopt;
  DisturbanceSpec spec;
  spec.amplitude = cfg.disturbance->amplitude;
  spec.frequency = cfg.disturbance->frequency;
  spec.components = cfg.disturbance->components;
  return spec;
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
  auto same_matrix = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.size() == 0 || (a.array() == b.array()).all());
  };
  return name == other.name && same_matrix(A, other.A) &&
         same_matrix(B, other.B) && disturbance == other.disturbance &&
         omega_passthrough == other.omega_passthrough &&
         same_matrix(P, other.P) && decay_c == other.decay_c && M == other.M &&
         algorithm == other.algorithm && horizon == other.horizon &&
         variants == other.variants &&
         same_matrix(initial_state, other.initial_state) &&
         total_steps == other.total_steps &&
         window_start == other.window_start && solver == other.solver &&
         warm_start == other.warm_start &&
         on_infeasible == other.on_infeasible && seed == other.seed &&
         samples == other.samples &&
         output_directory == other.output_directory;
}

const char* algorithm_token(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::MultiStep:
      return "multi_step";
    case Algorithm::ShrinkingUpdated:
      return "shrinking_updated";
    case Algorithm::Classic:
      return "classic";
  }
  return "multi_step";
}

Algorithm parse_algorithm_token(const std::string& token) {
  if (token == "multi_step") return Algorithm::MultiStep;
  if (token == "shrinking_updated") return Algorithm::ShrinkingUpdated;
  if (token == "classic") return Algorithm::Classic;
  throw ValidationError(
      "algorithm: unknown token '" + token +
      "' (expected multi_step, shrinking_updated, or classic)");
}

ScenarioConfig parse_scenario(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config root must be an object");
  const int schema = as_int(require(j, "schema", ""), "schema");
  if (schema != 1) {
    fail("schema", "unsupported version " + std::to_string(schema));
  }

  ScenarioConfig cfg;
  apply_system(cfg, require(j, "system", ""));
  const bool from_builtin = j.at("system").contains("builtin");
  if (!from_builtin) {
    if (!j.contains("fsclf")) fail("fsclf", "missing field");
    if (!j.contains("initial_state")) fail("initial_state", "missing field");
  }
  overlay_common_fields(cfg, j, from_builtin);
  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path_or_builtin) {
  namespace fs = std::filesystem;
  if (!fs::exists(path_or_builtin)) {
    if (path_or_builtin == "paper-nominal" ||
        path_or_builtin == "paper-perturbed") {
      return builtin_scenario(path_or_builtin);
    }
    throw IoError("cannot read config '" + path_or_builtin +
                  "' (not a file and not a builtin scenario)");
  }
  std::ifstream in(path_or_builtin, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path_or_builtin + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioConfig& config) {
  ordered_json j;
  j["schema"] = 1;
  j["name"] = config.name;
  ordered_json linear;
  linear["A"] = matrix_to_json(config.A);
  linear["B"] = matrix_to_json(config.B);
  if (config.disturbance) {
    ordered_json d;
    d["amplitude"] = config.disturbance->amplitude;
    d["frequency"] = config.disturbance->frequency;
    d["components"] = config.disturbance->components;
    linear["disturbance"] = std::move(d);
  }
  j["system"] = ordered_json{{"linear", std::move(linear)}};
  ordered_json fbody;
  if (!config.omega_passthrough) {
    fbody["P"] = matrix_to_json(config.P);
  }
  fbody["decay_c"] = config.decay_c;
  fbody["M"] = config.M;
  j["fsclf"] = config.omega_passthrough
                   ? ordered_json{{"omega-passthrough", std::move(fbody)}}
                   : ordered_json{{"quadratic", std::move(fbody)}};
  j["algorithm"] = algorithm_token(config.algorithm);
  j["horizon"] = config.horizon;
  if (!config.variants.empty()) {
    ordered_json vs = ordered_json::array();
    for (const VariantConfig& v : config.variants) {
      vs.push_back(ordered_json{{"algorithm", algorithm_token(v.algorithm)},
                                {"horizon", v.horizon}});
    }
    j["variants"] = std::move(vs);
  }
  j["initial_state"] = vector_to_json(config.initial_state);
  j["total_steps"] = config.total_steps;
  j["window_start"] = config.window_start;
  ordered_json s;
  if (config.solver.feasibility_tol) {
    s["feasibility_tol"] = *config.solver.feasibility_tol;
  }
  if (config.solver.optimality_tol) {
    s["optimality_tol"] = *config.solver.optimality_tol;
  }
  if (config.solver.max_outer_iters) {
    s["max_outer_iters"] = *config.solver.max_outer_iters;
  }
  if (config.solver.max_inner_iters) {
    s["max_inner_iters"] = *config.solver.max_inner_iters;
  }
  if (config.solver.initial_penalty) {
    s["initial_penalty"] = *config.solver.initial_penalty;
  }
  if (config.solver.fd_step) {
    s["fd_step"] = *config.solver.fd_step;
  }
  if (!s.empty()) j["solver"] = std::move(s);
  if (config.warm_start) {
    j["warm_start"] = *config.warm_start == WarmStartPolicy::shift_previous
                          ? "shift_previous"
                          : "zeros";
  }
  if (config.on_infeasible) {
    j["on_infeasible"] = *config.on_infeasible == InfeasibilityPolicy::halt
                             ? "halt"
                             : "continue_best";
  }
  j["seed"] = config.seed;
  j["samples"] = config.samples;
  if (config.output_directory) {
    j["output"] = ordered_json{{"directory", *config.output_directory}};
  }
  return j.dump(2) + "\n";
}

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name != "paper-nominal" && name != "paper-perturbed") {
    throw ValidationError("system.builtin: unknown builtin '" + name +
                          "' (expected paper-nominal or paper-perturbed)");
  }
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.A.resize(3, 3);
  cfg.A << 1.0, 1.0, 0.0,
           0.0, 1.0, 1.0,
           0.0, 0.0, 1.5;
  cfg.B.resize(3, 1);
  cfg.B << 0.0, 0.0, 1.0;
  if (name == "paper-perturbed") {
    DisturbanceConfig d;
    d.amplitude = 0.1;
    d.frequency = 0.25;
    d.components = {0};
    cfg.disturbance = d;
  }
  cfg.P.resize(3, 3);
  cfg.P << 1.0, 0.0, 0.25,
           0.0, 1.0, 0.25,
           0.25, 0.25, 1.0;
  cfg.decay_c = 0.9;
  cfg.M = 6;
  cfg.algorithm = Algorithm::MultiStep;
  cfg.horizon = 6;
  cfg.variants = {{Algorithm::MultiStep, 6},
                  {Algorithm::ShrinkingUpdated, 6},
                  {Algorithm::Classic, 6}};
  cfg.initial_state.resize(3);
  cfg.initial_state << -1.0, 1.0, 1.0;
  cfg.total_steps = 100;
  cfg.window_start = 36;
  return cfg;
}

ControlSystem make_true_system(const ScenarioConfig& config) {
  return make_linear_system(config.A, config.B, to_disturbance_spec(config));
}

ControlSystem make_nominal_system(const ScenarioConfig& config) {
  return make_linear_system(config.A, config.B, std::nullopt);
}

FsCLF make_fsclf(const ScenarioConfig& config) {
  const int n = static_cast<int>(config.A.rows());
  if (config.omega_passthrough) {
    return make_passthrough_fsclf(MeasurementFunction::euclidean_norm(n), n,
                                  config.decay_c, config.M);
  }
  return make_quadratic_fsclf(config.P, config.decay_c, config.M);
}

SolverConfig make_solver_config(const ScenarioConfig& config,
                                std::optional<double> tol_override) {
  SolverConfig solver;
  if (config.solver.feasibility_tol) {
    solver.feasibility_tol = *config.solver.feasibility_tol;
  }
  if (config.solver.optimality_tol) {
    solver.optimality_tol = *config.solver.optimality_tol;
  }
  if (config.solver.max_outer_iters) {
    solver.max_outer_iters = *config.solver.max_outer_iters;
  }
  if (config.solver.max_inner_iters) {
    solver.max_inner_iters = *config.solver.max_inner_iters;
  }
  if (config.solver.initial_penalty) {
    solver.initial_penalty = *config.solver.initial_penalty;
  }
  if (config.solver.fd_step) {
    solver.fd_step = *config.solver.fd_step;
  }
  if (tol_override) {
    if (!(*tol_override > 0.0)) {
      throw ValidationError("--tol must be positive");
    }
    solver.feasibility_tol = *tol_override;
    solver.optimality_tol = *tol_override * 1e-2;
  }
  return solver;
}

ClosedLoopConfig make_closed_loop_config(const ScenarioConfig& config,
                                         const VariantConfig& variant,
                                         const SolverConfig& solver) {
  ClosedLoopConfig loop;
  loop.algorithm = variant.algorithm;
  loop.horizon = variant.horizon;
  loop.total_steps = config.total_steps;
  loop.solver = solver;
  if (config.warm_start) loop.warm_start = *config.warm_start;
  loop.on_infeasible = config.on_infeasible;
  return loop;
}

}  // namespace fsclf::cli
