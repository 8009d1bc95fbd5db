#include "app.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "io.hpp"
#include "nlgs/evolution.hpp"
#include "nlgs/subcritical.hpp"
#include "nlgs/theorem_checks.hpp"

namespace nlgs::app {

namespace {

namespace fs = std::filesystem;

// Potential side of a scenario: V (h = 0) or Ṽ with shift h = m - 1.
struct Scenario {
  SpatialGrid grid;
  DispersalKernel kernel;
  Field v;
  double h = 0.0;
  bool subcritical = false;
  double support_radius = 0.0;

  Field mortality() const {
    const double c = 1.0 + h;
    return v.map([c](double x) { return c - x; });
  }
};

Scenario build_scenario(const ScenarioConfig& cfg) {
  const auto grid = cfg.make_grid();
  const auto kernel = cfg.make_kernel();
  const double margin = 2.0 * kernel.length_scale();
  if (cfg.subcritical) {
    const auto sub = SubcriticalPotential::build(cfg.subcritical->m, cfg.subcritical->shape, grid, margin);
    return {grid, kernel, sub.field(), sub.h(), true, sub.shape().support_radius(grid.spacing())};
  }
  const auto pot = Potential::build(cfg.potential->shape, grid, margin);
  return {grid, kernel, pot.field(), 0.0, false, pot.shape().support_radius(grid.spacing())};
}

GroundStateOutcome solve(const Scenario& s, const SolverConfig& cfg) {
  return nlgs::detail::solve_shifted(s.kernel, s.v, s.h, cfg);
}

void warn_box(const Scenario& s, std::ostream& log) {
  const double room = s.grid.half_width() - s.support_radius;
  if (room < 4.0 * s.kernel.length_scale())
    log << "warning: box half-width leaves " << format_double(room)
        << " beyond the potential support, under 4 kernel length scales\n";
}

double shell_ratio(const Field& psi, double width) { return boundary_shell_max(psi, width) / sup_norm(psi); }

Record curve_record(const std::vector<std::pair<double, double>>& curve) {
  Record a = Record::array();
  for (const auto& [lam, r] : curve) a.push_back(Record::array({lam, r}));
  return a;
}

std::vector<std::vector<double>> curve_rows(const std::vector<std::pair<double, double>>& curve) {
  std::vector<std::vector<double>> rows;
  for (const auto& [lam, r] : curve) rows.push_back({lam, r});
  return rows;
}

Record found_record(const EigenpairResult& res, const Scenario& s) {
  Record r;
  r["status"] = "found";
  r["lambda0"] = res.lambda0;
  if (s.subcritical) {
    r["h"] = res.h;
    r["lambda_hat"] = res.lambda_hat();
  }
  r["residual_sup"] = res.residual_sup;
  r["residual_l2"] = res.residual_l2;
  r["relative_residual_l2"] = res.relative_residual_l2;
  r["power_iterations_total"] = res.power_iterations_total;
  r["power_iterations_final"] = res.power_iterations_final;
  r["spectral_gap_ratio"] = res.spectral_gap_ratio;
  r["bracket"] = Record::array({res.bracket.lower, res.bracket.upper});
  r["bisection_steps"] = res.bracket_history.size();
  r["psi_min"] = res.psi.min();
  r["psi_sup"] = sup_norm(res.psi);
  r["boundary_shell_ratio"] = shell_ratio(res.psi, s.kernel.length_scale());
  return r;
}

Record not_found_record(const NotFound& nf) {
  Record r;
  r["status"] = "not_found";
  r["lambda_min"] = nf.lambda_min;
  r["r_at_lambda_min"] = nf.r_at_lambda_min;
  return r;
}

// Post-conditions on a found ground state; violations are solver errors.
void check_found(const EigenpairResult& res, const Scenario& s, std::ostream& log) {
  if (!(res.psi.min() > 0.0)) throw NumericalError("ground state is not strictly positive");
  if (!s.subcritical && !(res.lambda0 > 0.0 && res.lambda0 <= 1.0))
    throw NumericalError("ground-state eigenvalue " + format_double(res.lambda0) + " outside (0, 1]");
  if (s.subcritical && !(res.lambda0 > s.h)) throw NumericalError("internal root does not exceed h");
  const double ratio = shell_ratio(res.psi, s.kernel.length_scale());
  if (ratio > 1e-6)
    log << "warning: ground state at the boundary shell is " << format_double(ratio)
        << " of its sup; enlarge the box\n";
}

Field initial_density(const InitialDensity& u0, const SpatialGrid& g) {
  if (u0.kind == InitialDensity::Kind::constant) return Field::constant(g, u0.amplitude);
  return Field::from_function(g, [&](const Point& x) {
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      const double d = (x[k] - u0.centre[k]) / u0.width;
      s += d * d;
    }
    return u0.amplitude * std::exp(-0.5 * s);
  });
}

std::string snapshot_name(double t) {
  std::ostringstream os;
  os << "snapshot_t" << std::setprecision(6) << t << ".csv";
  return os.str();
}

int cmd_solve(const ScenarioConfig& cfg, const Scenario& s, const Provenance& prov, const fs::path& out,
              std::ostream& log) {
  warn_box(s, log);
  const auto outcome = solve(s, cfg.solver);
  Record body;
  if (found(outcome)) {
    const auto& res = result(outcome);
    check_found(res, s, log);
    body = found_record(res, s);
    write_field(out / "psi.csv", prov, res.psi);
    write_table(out / "r_curve.csv", prov, "lambda,r", curve_rows(res.r_curve));
    log << "found lambda0 = " << format_double(res.lambda0) << '\n';
  } else {
    const auto& nf = not_found(outcome);
    body = not_found_record(nf);
    write_table(out / "r_curve.csv", prov, "lambda,r", curve_rows(nf.r_curve));
    log << "no ground state above lambda_min (r = " << format_double(nf.r_at_lambda_min) << ")\n";
  }
  write_record(out / "summary.json", prov, std::move(body));
  return exit_ok;
}

int cmd_scan(const ScenarioConfig& cfg, const Scenario& s, const Provenance& prov, const fs::path& out,
             std::ostream& log) {
  if (!cfg.scan) throw ConfigError("command 'scan' needs a 'scan' section");
  std::vector<double> lams = cfg.scan->lambdas;
  if (s.subcritical)
    for (double lam : lams)
      if (!(lam > s.h)) throw ConfigError("subcritical scan lambdas must exceed h = " + format_double(s.h));
  const auto curve = scan_r(s.kernel, s.v, lams, cfg.solver);
  write_table(out / "r_scan.csv", prov, "lambda,r", curve_rows(curve));
  Record body;
  body["points"] = curve.size();
  body["r_curve"] = curve_record(curve);
  write_record(out / "summary.json", prov, std::move(body));
  log << "scanned " << curve.size() << " lambda values\n";
  return exit_ok;
}

int cmd_evolve(const ScenarioConfig& cfg, const Scenario& s, const Provenance& prov, const fs::path& out,
               std::ostream& log) {
  if (!cfg.evolution) throw ConfigError("command 'evolve' needs an 'evolution' section");
  const auto& e = *cfg.evolution;
  EvolutionRun run{.u0 = initial_density(e.u0, s.grid),
                   .t_end = e.t_end,
                   .dt = e.dt,
                   .snapshot_times = e.snapshots,
                   .reference = std::nullopt,
                   .local_radius = e.local_radius};
  Record body;
  std::optional<double> lambda0;
  if (e.reference == "solve") {
    const auto outcome = solve(s, cfg.solver);
    if (found(outcome)) {
      run.reference = result(outcome).psi;
      lambda0 = result(outcome).lambda_hat();
    } else {
      log << "warning: no ground state; shape distance not recorded\n";
    }
  } else if (e.reference != "none") {
    std::ifstream in(e.reference);
    if (!in) throw ConfigError("cannot open evolution.reference " + e.reference);
    Field ref = read_field_csv(in);
    if (!(ref.grid() == s.grid)) throw ConfigError("evolution.reference lives on a different grid");
    run.reference = std::move(ref);
  }
  if (e.mortality && e.reference == "solve")
    throw ConfigError("evolution.mortality replaces the scenario, so reference 'solve' does not apply");
  const Field mortality = e.mortality ? Field::constant(s.grid, *e.mortality) : s.mortality();
  const auto series = evolve(run, s.kernel, mortality);

  std::vector<std::vector<double>> rows, diag;
  for (const auto& p : series.points) {
    rows.push_back({p.t, p.mass, p.log_mass, p.shape_distance});
    diag.push_back({p.t, p.local_mass, p.min_relative});
  }
  write_table(out / "series.csv", prov, "t,mass,log_mass,shape_distance", rows);
  write_table(out / "diagnostics.csv", prov, "t,local_mass,min_relative", diag);
  for (const auto& [t, f] : series.snapshots) write_field(out / snapshot_name(t), prov, f);

  const auto fit = growth_fit(series);
  body["growth_rate"] = fit.slope;
  body["prefactor"] = fit.prefactor();
  body["final_mass"] = series.points.back().mass;
  body["final_shape_distance"] = series.points.back().shape_distance;
  double worst = 0.0;
  for (const auto& p : series.points) worst = std::min(worst, p.min_relative);
  body["min_relative"] = worst;
  if (run.reference) {
    const auto& psi = *run.reference;
    body["predicted_prefactor"] = inner_product(run.u0, psi) * integral(psi) / inner_product(psi, psi);
  }
  if (lambda0) body["reference_eigenvalue"] = *lambda0;
  body["snapshots"] = series.snapshots.size();
  write_record(out / "summary.json", prov, std::move(body));
  log << "growth rate " << format_double(fit.slope) << '\n';
  return exit_ok;
}

int cmd_check(const ScenarioConfig& cfg, const Scenario& s, const Provenance& prov, const fs::path& out,
              std::ostream& log) {
  if (!cfg.checks) throw ConfigError("command 'check' needs a 'checks' section");
  const auto& c = *cfg.checks;
  Record body;
  if (c.paradise_bound) {
    Record a = Record::array();
    for (double lam : c.paradise_bound->lambdas) {
      const auto b = paradise_lower_bound(s.kernel, s.grid, c.paradise_bound->delta, lam, cfg.solver.symbol_mode);
      Record r;
      r["delta"] = c.paradise_bound->delta;
      r["lambda"] = lam;
      r["min_q_chi"] = b.min_q_chi;
      r["bound"] = b.bound;
      r["min_g"] = b.min_g;
      r["volume_inner"] = b.volume_inner;
      r["ratio"] = b.ratio;
      r["holds"] = b.ratio >= 1.0;
      a.push_back(std::move(r));
    }
    body["paradise_bound"] = std::move(a);
  }
  if (c.rayleigh) {
    std::vector<std::vector<double>> rows;
    Record a = Record::array();
    for (double radius : c.rayleigh->radii) {
      const auto t = rayleigh_quotient_test(s.kernel, s.grid, c.rayleigh->beta, radius);
      rows.push_back({radius, t.form_value, t.dissipation_ratio, t.volume});
      Record r;
      r["R"] = radius;
      r["form_value"] = t.form_value;
      r["dissipation_ratio"] = t.dissipation_ratio;
      r["volume"] = t.volume;
      a.push_back(std::move(r));
    }
    write_table(out / "rayleigh_sweep.csv", prov, "R,form_value,dissipation_ratio,volume", rows);
    body["rayleigh"] = std::move(a);
  }
  if (c.theorem1) {
    const auto rep = theorem1_applicability(s.kernel, s.grid, s.v);
    Record r;
    r["dimension_ok"] = rep.dimension_ok;
    r["second_moment"] = rep.second_moment.value;
    r["second_moment_doubling_ratio"] = rep.second_moment.doubling_ratio;
    r["second_moment_infinite"] = rep.second_moment.effectively_infinite;
    r["potential_nonzero"] = rep.potential_nonzero;
    r["curvature"] = rep.curvature;
    r["quartic_coefficient"] = rep.quartic_coefficient;
    r["applicable"] = rep.applicable;
    body["theorem1"] = std::move(r);
  }
  if (c.epsilon_scan) {
    const auto scan = epsilon_scan(s.kernel, s.grid, c.epsilon_scan->delta, c.epsilon_scan->epsilons, cfg.solver);
    std::vector<std::vector<double>> rows;
    for (const auto& e : scan.entries) rows.push_back({e.epsilon, e.found ? 1.0 : 0.0, e.value});
    write_table(out / "epsilon_scan.csv", prov, "epsilon,found,value", rows);
    Record r;
    r["delta"] = c.epsilon_scan->delta;
    r["transition_epsilon"] = scan.transition_epsilon ? Record(*scan.transition_epsilon) : Record(nullptr);
    body["epsilon_scan"] = std::move(r);
  }
  write_record(out / "checks.json", prov, std::move(body));
  log << "checks written\n";
  return exit_ok;
}

int cmd_oracle(const ScenarioConfig& cfg, const Scenario& s, const Provenance& prov, const fs::path& out,
               std::ostream& log) {
  dense::require_size_cap(s.grid);
  const auto dense_pair = dense_oracle(sample(s.kernel, s.grid), s.mortality());
  const auto outcome = solve(s, cfg.solver);
  Record body;
  body["dense_top_eigenvalue"] = dense_pair.top_eigenvalue;
  body["dense_iterations"] = dense_pair.iterations;
  bool agree = false;
  if (found(outcome)) {
    const auto& res = result(outcome);
    const double diff = std::abs(res.lambda_hat() - dense_pair.top_eigenvalue);
    const double np = l2_norm(res.psi), nd = l2_norm(dense_pair.eigenvector);
    const double shape =
        l2_norm(zip(res.psi, dense_pair.eigenvector, [np, nd](double a, double b) { return a / np - b / nd; }));
    agree = diff < cfg.oracle.tolerance && shape < cfg.oracle.shape_tolerance;
    body["status"] = "found";
    body["bisection_eigenvalue"] = res.lambda_hat();
    body["eigenvalue_difference"] = diff;
    body["shape_difference_l2"] = shape;
  } else {
    // Absence is consistent when the dense spectrum sits below the bracket floor.
    const auto& nf = not_found(outcome);
    agree = dense_pair.top_eigenvalue <= nf.lambda_min - s.h + cfg.oracle.tolerance;
    body["status"] = "not_found";
    body["lambda_min"] = nf.lambda_min;
    body["r_at_lambda_min"] = nf.r_at_lambda_min;
  }
  body["tolerance"] = cfg.oracle.tolerance;
  body["shape_tolerance"] = cfg.oracle.shape_tolerance;
  body["agree"] = agree;
  write_record(out / "oracle.json", prov, std::move(body));
  log << (agree ? "oracle agrees\n" : "oracle DISAGREES\n");
  return agree ? exit_ok : exit_oracle;
}

}  // namespace

int run(const std::string& command, const ScenarioConfig& config, const RunOptions& options, std::ostream& log) {
  try {
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      throw ConfigError("unknown command '" + command + "'");
    if (config.command && *config.command != command)
      throw ConfigError("config is for command '" + *config.command + "', not '" + command + "'");
    const fs::path out = options.out_dir ? *options.out_dir : fs::path(config.output_dir);
    Scenario s = [&] {
      try {
        return build_scenario(config);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }();
    fs::create_directories(out);
    const Provenance prov{command, config.source, options.seed};
    if (command == "solve") return cmd_solve(config, s, prov, out, log);
    if (command == "scan") return cmd_scan(config, s, prov, out, log);
    if (command == "evolve") return cmd_evolve(config, s, prov, out, log);
    if (command == "check") return cmd_check(config, s, prov, out, log);
    return cmd_oracle(config, s, prov, out, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const InvalidArgument& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    log << "solver error: " << e.what() << '\n';
    return exit_solver;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_solver;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return exit_solver;
  }
}

int run_file(const std::string& command, const fs::path& config_path, const RunOptions& options, std::ostream& log) {
  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config;
  }
  return run(command, cfg, options, log);
}

}  // namespace nlgs::app
