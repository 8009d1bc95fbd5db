#pragma once

// Scenario configuration: a JSON document with a fixed key hierarchy.
// Unknown keys are rejected.

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlgs/dispersal.hpp"
#include "nlgs/eigensolver.hpp"
#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"
#include "nlgs/potential.hpp"

namespace nlgs::app {

using Json = nlohmann::json;

struct GridConfig {
  int dim = 1;
  double half_width = 20.0;
  std::size_t points_per_axis = 512;
};

struct KernelConfig {
  KernelFamily family = KernelFamily::gaussian;
  double parameter = 1.0;
  SymbolMode symbol_mode = SymbolMode::sampled;
};

struct PotentialConfig {
  PotentialShape shape;
};

struct SubcriticalConfig {
  double m = 1.5;
  PotentialShape shape;
};

struct ScanConfig {
  std::vector<double> lambdas;
};

struct InitialDensity {
  enum class Kind { constant, gaussian } kind = Kind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  std::array<double, 3> centre{0.0, 0.0, 0.0};
};

struct EvolutionConfig {
  double t_end = 10.0;
  double dt = 0.05;
  InitialDensity u0;
  std::vector<double> snapshots;
  /// "none", "solve" (compute ψ in-process) or a path to a ψ field dump.
  std::string reference = "none";
  double local_radius = 1.0;
  /// Constant mortality replacing the scenario's m (controls such as m ≡ 0).
  std::optional<double> mortality;
};

struct ParadiseBoundCheck {
  double delta = 0.5;
  std::vector<double> lambdas{0.1, 0.5, 0.9};
};

struct RayleighCheck {
  double beta = 0.5;
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
};

struct EpsilonCheck {
  double delta = 0.5;
  std::vector<double> epsilons;
};

struct ChecksConfig {
  std::optional<ParadiseBoundCheck> paradise_bound;
  std::optional<RayleighCheck> rayleigh;
  bool theorem1 = false;
  std::optional<EpsilonCheck> epsilon_scan;
};

struct OracleConfig {
  double tolerance = 1e-8;
  double shape_tolerance = 1e-6;
};

struct ScenarioConfig {
  std::optional<std::string> command;
  GridConfig grid;
  KernelConfig kernel;
  std::optional<PotentialConfig> potential;
  std::optional<SubcriticalConfig> subcritical;
  SolverConfig solver;
  std::optional<ScanConfig> scan;
  std::optional<EvolutionConfig> evolution;
  std::optional<ChecksConfig> checks;
  OracleConfig oracle;
  std::string output_dir = "out";
  /// Canonical echo of the parsed document.
  Json source;

  SpatialGrid make_grid() const { return SpatialGrid(grid.dim, grid.half_width, grid.points_per_axis); }
  DispersalKernel make_kernel() const { return DispersalKernel(kernel.family, kernel.parameter, grid.dim); }
};

namespace detail {

inline void require_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

inline double number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

inline double number_or(const Json& j, const std::string& key, const std::string& where, double fallback) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

inline long integer(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return j.at(key).get<long>();
}

inline std::string string(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

inline std::vector<double> numbers(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  const auto& a = j.at(key);
  if (!a.is_array()) throw ConfigError(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline GridConfig parse_grid(const Json& j) {
  require_keys(j, "grid", {"dim", "half_width", "points_per_axis"});
  GridConfig g;
  g.dim = static_cast<int>(integer(j, "dim", "grid"));
  g.half_width = number(j, "half_width", "grid");
  const long n = integer(j, "points_per_axis", "grid");
  if (n <= 0) throw ConfigError("grid.points_per_axis must be positive");
  g.points_per_axis = static_cast<std::size_t>(n);
  return g;
}

inline const char* kernel_param_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "sigma";
    case KernelFamily::exponential: return "theta";
    case KernelFamily::tent: return "radius";
    case KernelFamily::heavy_tail: return "alpha";
  }
  return "";
}

inline KernelConfig parse_kernel(const Json& j) {
  require_keys(j, "kernel", {"family", "params", "symbol_mode"});
  KernelConfig k;
  const auto fam = kernel_family_from_string(string(j, "family", "kernel"));
  if (!fam) throw ConfigError("unknown kernel.family '" + j.at("family").get<std::string>() + "'");
  k.family = *fam;
  const char* name = kernel_param_name(k.family);
  if (!j.contains("params")) throw ConfigError("missing key 'params' in kernel");
  const auto& p = j.at("params");
  require_keys(p, "kernel.params", {name});
  k.parameter = number(p, name, "kernel.params");
  if (j.contains("symbol_mode")) {
    const auto s = string(j, "symbol_mode", "kernel");
    if (s == "analytic") k.symbol_mode = SymbolMode::analytic;
    else if (s == "sampled") k.symbol_mode = SymbolMode::sampled;
    else throw ConfigError("kernel.symbol_mode must be 'analytic' or 'sampled'");
  }
  return k;
}

// `cap` replaces the paradise amplitude (1 for V, m for Ṽ).
inline PotentialShape parse_shape(const Json& j, const std::string& where, double cap) {
  const auto kind = shape_kind_from_string(string(j, "shape", where));
  if (!kind) throw ConfigError("unknown " + where + ".shape '" + j.at("shape").get<std::string>() + "'");
  const Json p = j.contains("params") ? j.at("params") : Json::object();
  const std::string pw = where + ".params";
  switch (*kind) {
    case ShapeKind::zero: require_keys(p, pw, {}); return PotentialShape::zero();
    case ShapeKind::paradise_ball: {
      require_keys(p, pw, {"delta"});
      return PotentialShape::plateau(cap, number(p, "delta", pw));
    }
    case ShapeKind::plateau: {
      require_keys(p, pw, {"beta", "R"});
      return PotentialShape::plateau(number(p, "beta", pw), number(p, "R", pw));
    }
    case ShapeKind::bump: {
      require_keys(p, pw, {"h0", "delta"});
      return PotentialShape::bump(number(p, "h0", pw), number(p, "delta", pw));
    }
  }
  throw ConfigError("unhandled shape");
}

inline PotentialShape with_kind(PotentialShape s, ShapeKind kind) {
  s.kind = kind;
  return s;
}

inline SolverConfig parse_solver(const Json& j, SolverConfig cfg) {
  require_keys(j, "solver",
               {"max_iters", "eigenvalue_tol", "residual_tol", "lambda_min", "bracket_width", "gap_iters"});
  if (j.contains("max_iters")) cfg.power.max_iters = static_cast<int>(integer(j, "max_iters", "solver"));
  cfg.power.eigenvalue_tol = number_or(j, "eigenvalue_tol", "solver", cfg.power.eigenvalue_tol);
  cfg.power.residual_tol = number_or(j, "residual_tol", "solver", cfg.power.residual_tol);
  cfg.lambda_min = number_or(j, "lambda_min", "solver", cfg.lambda_min);
  cfg.bracket_width = number_or(j, "bracket_width", "solver", cfg.bracket_width);
  if (j.contains("gap_iters")) cfg.gap_iters = static_cast<int>(integer(j, "gap_iters", "solver"));
  if (cfg.power.max_iters <= 0 || !(cfg.power.eigenvalue_tol > 0) || !(cfg.power.residual_tol > 0) ||
      !(cfg.lambda_min > 0) || !(cfg.bracket_width > 0) || cfg.gap_iters < 0)
    throw ConfigError("solver tolerances and limits must be positive");
  return cfg;
}

inline ScanConfig parse_scan(const Json& j) {
  require_keys(j, "scan", {"lambdas", "from", "to", "count"});
  ScanConfig s;
  if (j.contains("lambdas")) {
    if (j.contains("from") || j.contains("to") || j.contains("count"))
      throw ConfigError("scan takes either 'lambdas' or 'from'/'to'/'count'");
    s.lambdas = numbers(j, "lambdas", "scan");
  } else {
    const double from = number(j, "from", "scan"), to = number(j, "to", "scan");
    const long count = integer(j, "count", "scan");
    if (count < 2 || !(from > 0.0) || !(to > from)) throw ConfigError("scan range needs 0 < from < to, count >= 2");
    for (long k = 0; k < count; ++k)
      s.lambdas.push_back(from + (to - from) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  if (s.lambdas.empty()) throw ConfigError("scan.lambdas is empty");
  for (std::size_t i = 0; i < s.lambdas.size(); ++i)
    if (!(s.lambdas[i] > 0.0) || (i > 0 && !(s.lambdas[i] > s.lambdas[i - 1])))
      throw ConfigError("scan.lambdas must be positive and strictly ascending");
  return s;
}

inline InitialDensity parse_u0(const Json& j, int dim) {
  require_keys(j, "evolution.u0", {"shape", "params"});
  InitialDensity u;
  const auto shape = string(j, "shape", "evolution.u0");
  const Json p = j.contains("params") ? j.at("params") : Json::object();
  if (shape == "constant") {
    u.kind = InitialDensity::Kind::constant;
    require_keys(p, "evolution.u0.params", {"value"});
    u.amplitude = number_or(p, "value", "evolution.u0.params", 1.0);
  } else if (shape == "gaussian") {
    u.kind = InitialDensity::Kind::gaussian;
    require_keys(p, "evolution.u0.params", {"amplitude", "width", "centre"});
    u.amplitude = number_or(p, "amplitude", "evolution.u0.params", 1.0);
    u.width = number_or(p, "width", "evolution.u0.params", 1.0);
    if (p.contains("centre")) {
      const auto c = numbers(p, "centre", "evolution.u0.params");
      if (static_cast<int>(c.size()) != dim) throw ConfigError("evolution.u0.params.centre needs grid.dim entries");
      for (int k = 0; k < dim; ++k) u.centre[k] = c[k];
    }
    if (!(u.width > 0.0)) throw ConfigError("evolution.u0.params.width must be positive");
  } else {
    throw ConfigError("evolution.u0.shape must be 'constant' or 'gaussian'");
  }
  if (!(u.amplitude > 0.0)) throw ConfigError("initial density amplitude must be positive");
  return u;
}

inline EvolutionConfig parse_evolution(const Json& j, int dim) {
  require_keys(j, "evolution", {"t_end", "dt", "u0", "snapshots", "reference", "local_radius", "mortality"});
  EvolutionConfig e;
  e.t_end = number(j, "t_end", "evolution");
  e.dt = number(j, "dt", "evolution");
  if (j.contains("u0")) e.u0 = parse_u0(j.at("u0"), dim);
  if (j.contains("snapshots")) e.snapshots = numbers(j, "snapshots", "evolution");
  if (j.contains("reference")) e.reference = string(j, "reference", "evolution");
  e.local_radius = number_or(j, "local_radius", "evolution", e.local_radius);
  if (j.contains("mortality")) {
    e.mortality = number(j, "mortality", "evolution");
    if (!(*e.mortality >= 0.0)) throw ConfigError("evolution.mortality must be nonnegative");
  }
  if (!(e.t_end > 0.0) || !(e.dt > 0.0)) throw ConfigError("evolution.t_end and evolution.dt must be positive");
  return e;
}

inline ChecksConfig parse_checks(const Json& j) {
  require_keys(j, "checks", {"paradise_bound", "rayleigh", "theorem1", "epsilon_scan"});
  ChecksConfig c;
  if (j.contains("paradise_bound")) {
    const auto& p = j.at("paradise_bound");
    require_keys(p, "checks.paradise_bound", {"delta", "lambdas"});
    ParadiseBoundCheck b;
    b.delta = number_or(p, "delta", "checks.paradise_bound", b.delta);
    if (p.contains("lambdas")) b.lambdas = numbers(p, "lambdas", "checks.paradise_bound");
    c.paradise_bound = b;
  }
  if (j.contains("rayleigh")) {
    const auto& p = j.at("rayleigh");
    require_keys(p, "checks.rayleigh", {"beta", "radii"});
    RayleighCheck r;
    r.beta = number_or(p, "beta", "checks.rayleigh", r.beta);
    if (p.contains("radii")) r.radii = numbers(p, "radii", "checks.rayleigh");
    c.rayleigh = r;
  }
  if (j.contains("theorem1")) {
    if (!j.at("theorem1").is_boolean()) throw ConfigError("checks.theorem1 must be a boolean");
    c.theorem1 = j.at("theorem1").get<bool>();
  }
  if (j.contains("epsilon_scan")) {
    const auto& p = j.at("epsilon_scan");
    require_keys(p, "checks.epsilon_scan", {"delta", "epsilons"});
    EpsilonCheck e;
    e.delta = number_or(p, "delta", "checks.epsilon_scan", e.delta);
    e.epsilons = numbers(p, "epsilons", "checks.epsilon_scan");
    c.epsilon_scan = e;
  }
  return c;
}

}  // namespace detail

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"solve", "scan", "evolve", "check", "oracle"};
  return c;
}

/// Parses and validates a scenario document. Throws ConfigError.
inline ScenarioConfig parse_config(const Json& j) {
  using namespace detail;
  require_keys(j, "config",
               {"command", "grid", "kernel", "potential", "subcritical", "mode", "solver", "scan", "evolution",
                "checks", "oracle", "output_dir"});
  ScenarioConfig c;
  c.source = j;
  if (j.contains("command")) {
    c.command = string(j, "command", "config");
    if (std::find(commands().begin(), commands().end(), *c.command) == commands().end())
      throw ConfigError("unknown command '" + *c.command + "'");
  }
  if (!j.contains("grid")) throw ConfigError("missing key 'grid' in config");
  if (!j.contains("kernel")) throw ConfigError("missing key 'kernel' in config");
  c.grid = parse_grid(j.at("grid"));
  c.kernel = parse_kernel(j.at("kernel"));
  if (j.contains("potential") == j.contains("subcritical"))
    throw ConfigError("exactly one of 'potential' and 'subcritical' must be present");
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    require_keys(p, "potential", {"shape", "params"});
    // paradise_ball keeps its own kind so it is reported as such.
    auto shape = parse_shape(p, "potential", 1.0);
    if (p.at("shape") == "paradise_ball") shape = with_kind(shape, ShapeKind::paradise_ball);
    c.potential = PotentialConfig{shape};
  } else {
    const auto& p = j.at("subcritical");
    require_keys(p, "subcritical", {"m", "shape", "params"});
    SubcriticalConfig s;
    s.m = number(p, "m", "subcritical");
    s.shape = parse_shape(p, "subcritical", s.m);
    c.subcritical = s;
  }
  if (j.contains("mode")) {
    const auto m = string(j, "mode", "config");
    if (m == "cb") c.solver.mode = OperatorMode::cb;
    else if (m == "l2_symmetric") c.solver.mode = OperatorMode::l2_symmetric;
    else throw ConfigError("mode must be 'cb' or 'l2_symmetric'");
  }
  c.solver.symbol_mode = c.kernel.symbol_mode;
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"), c.solver);
  if (j.contains("scan")) c.scan = parse_scan(j.at("scan"));
  if (j.contains("evolution")) c.evolution = parse_evolution(j.at("evolution"), c.grid.dim);
  if (j.contains("checks")) c.checks = parse_checks(j.at("checks"));
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    require_keys(o, "oracle", {"tolerance", "shape_tolerance"});
    c.oracle.tolerance = number_or(o, "tolerance", "oracle", c.oracle.tolerance);
    c.oracle.shape_tolerance = number_or(o, "shape_tolerance", "oracle", c.oracle.shape_tolerance);
  }
  if (j.contains("output_dir")) c.output_dir = string(j, "output_dir", "config");

  // Module-level validation: construct the grid and kernel once.
  try {
    (void)c.make_kernel();
    (void)c.make_grid();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace nlgs::app
