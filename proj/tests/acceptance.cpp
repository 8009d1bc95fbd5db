// Acceptance run: one PASS/FAIL line per criterion. Tolerances and runtime
// budgets are fixed below; a criterion passes only if every check holds and it
// finishes inside its budget.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlgs/dense.hpp"
#include "nlgs/eigensolver.hpp"
#include "nlgs/evolution.hpp"
#include "nlgs/subcritical.hpp"
#include "nlgs/theorem_checks.hpp"

using namespace nlgs;

namespace {

namespace tol {
constexpr double criticality = 1e-10;
constexpr double oracle_eigenvalue = 1e-8;
constexpr double oracle_shape = 1e-6;
constexpr double r_at_50 = 1e-2;
constexpr double shell = 1e-4;
constexpr double residual = 1e-8;
constexpr double form_slack = 1e-8;
constexpr double paradise_ratio = 1.0;
constexpr double subcritical_form = 1e-10;
constexpr double slope_rel = 0.01;
constexpr double shape_distance = 1e-3;
constexpr double prefactor_rel = 0.05;
constexpr double null_slope = 1e-6;
constexpr double s_hat_eigenvalue = 1e-8;
constexpr double s_hat_symmetry = 1e-12;
constexpr double direct_sum = 1e-10;
constexpr double resolvent_identity = 1e-10;
}  // namespace tol

class Check {
 public:
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok_ = false;
      failed_.push_back(what);
    }
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return ok_; }
  std::string summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < notes_.size(); ++i) os << (i ? "; " : "") << notes_[i];
    if (!failed_.empty()) {
      os << " | failed:";
      for (const auto& f : failed_) os << ' ' << f << ';';
    }
    return os.str();
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failed_;
  std::vector<std::string> notes_;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_shape_diff(const Field& a, const Field& b) {
  const double na = l2_norm(a), nb = l2_norm(b);
  return l2_norm(zip(a, b, [na, nb](double x, double y) { return x / na - y / nb; }));
}

Field random_field(const SpatialGrid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = u(rng);
  return Field(g, std::move(v));
}

Field gaussian_bump(const SpatialGrid& g, double centre, double width) {
  return Field::from_function(g, [=](const Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) r2 += (x[k] - (k == 0 ? centre : 0.0)) * (x[k] - (k == 0 ? centre : 0.0));
    return std::exp(-r2 / (2.0 * width * width));
  });
}

// Every Found result with 0 <= m <= 1 lands here; criterion 10 asserts λ₀ ∈ (0, 1] on all of them.
std::vector<std::pair<std::string, double>> critical_found;

std::optional<EigenpairResult> record_found(const GroundStateOutcome& o, const std::string& label) {
  if (!found(o)) return std::nullopt;
  critical_found.emplace_back(label, result(o).lambda0);
  return result(o);
}

Field direct_convolution(const Field& kernel, const Field& f) {
  const auto& grid = f.grid();
  const std::size_t n = grid.points_per_axis();
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto a = grid.multi_index(i);
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto b = grid.multi_index(j);
      std::array<std::size_t, 3> d{0, 0, 0};
      for (int k = 0; k < grid.dim(); ++k) d[k] = (a[k] + n + n / 2 - b[k]) % n;
      s += kernel[grid.flat(d)] * f[j];
    }
    out[i] = grid.cell_volume() * s;
  }
  return Field(grid, std::move(out));
}

std::vector<double> lambda_grid_0p1_to_2() {
  std::vector<double> l;
  for (int i = 1; i <= 20; ++i) l.push_back(0.1 * i);
  return l;
}

// ---------------------------------------------------------------------------

void criticality(Check& c) {
  const SpatialGrid g(1, 20.0, 512);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  const auto m = Field::constant(g, 1.0);
  const auto dense = dense_oracle(sample(kernel, g), m);
  c.note("dense top " + sci(dense.top_eigenvalue));
  c.require(std::abs(dense.top_eigenvalue) < tol::criticality, "dense top eigenvalue");

  EvolutionRun run{.u0 = Field::constant(g, 1.0), .t_end = 10.0, .dt = 0.05,
                   .snapshot_times = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
  const auto s = evolve(run, kernel, m);
  double dev = max_abs_diff(s.final_state, run.u0);
  for (const auto& [t, u] : s.snapshots) dev = std::max(dev, max_abs_diff(u, run.u0));
  c.note("max |u(t)-1| " + sci(dev) + " over " + std::to_string(s.snapshots.size()) + " snapshots");
  c.require(s.snapshots.size() == 10, "snapshot count");
  c.require(dev < tol::criticality, "constant stationary");
}

void oracle_equivalence(Check& c) {
  const SpatialGrid g(1, 20.0, 256);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  const auto pot = Potential::build(PotentialShape::paradise_ball(0.5), g);
  const auto out = find_ground_state(kernel, pot);
  const auto res = record_found(out, "oracle d=1 n=256");
  c.require(res.has_value(), "Found");
  if (!res) return;
  const auto dense = dense_oracle(sample(kernel, g), pot.mortality());
  const double de = std::abs(res->lambda0 - dense.top_eigenvalue);
  const double ds = l2_shape_diff(res->psi, dense.eigenvector);
  c.note("lambda0 " + format_double(res->lambda0) + ", |diff| " + sci(de) + ", shape " + sci(ds));
  c.require(de < tol::oracle_eigenvalue, "eigenvalue");
  c.require(ds < tol::oracle_shape, "eigenfunction");
}

void monotone_radius(Check& c) {
  struct Case {
    std::string name;
    SpatialGrid grid;
    PotentialShape shape;
  };
  const std::vector<Case> cases{{"paradise d=1", SpatialGrid(1, 20.0, 512), PotentialShape::paradise_ball(0.5)},
                                {"plateau d=2", SpatialGrid(2, 10.0, 64), PotentialShape::plateau(0.5, 1.0)},
                                {"paradise d=3", SpatialGrid(3, 10.0, 48), PotentialShape::paradise_ball(0.5)}};
  const auto lambdas = lambda_grid_0p1_to_2();
  const std::vector<double> fifty{50.0};
  for (const auto& cs : cases) {
    const auto kernel = DispersalKernel::gaussian(1.0, cs.grid.dim());
    const auto pot = Potential::build(cs.shape, cs.grid);
    const auto curve = scan_r(kernel, pot.field(), lambdas);
    bool strict = true;
    for (std::size_t i = 1; i < curve.size(); ++i) strict = strict && curve[i].second < curve[i - 1].second;
    const double r50 = scan_r(kernel, pot.field(), fifty).front().second;
    c.note(cs.name + ": r(0.1) " + sci(curve.front().second) + ", r(2) " + sci(curve.back().second) + ", r(50) " +
           sci(r50));
    c.require(strict, cs.name + " strictly decreasing");
    c.require(r50 < tol::r_at_50, cs.name + " r(50)");
  }
}

void small_paradise(Check& c) {
  const SpatialGrid g(3, 10.0, 48);
  const auto kernel = DispersalKernel::gaussian(1.0, 3);
  for (double delta : {0.25, 0.125}) {
    const auto pot = Potential::build(PotentialShape::paradise_ball(delta), g);
    const auto out = find_ground_state(kernel, pot);
    const std::string tag = "delta=" + format_double(delta);
    const auto res = record_found(out, "paradise d=3 " + tag);
    c.require(res.has_value(), tag + " Found");
    if (!res) continue;
    const double shell = boundary_shell_max(res->psi, kernel.length_scale()) / sup_norm(res->psi);
    c.note(tag + ": lambda0 " + sci(res->lambda0) + ", min psi/sup " + sci(res->psi.min() / sup_norm(res->psi)) +
           ", shell " + sci(shell) + ", residual " + sci(res->relative_residual_l2));
    if (delta == 0.25) {
      c.require(res->lambda0 > 0.0, tag + " lambda0 > 0");
      c.require(res->psi.min() > 0.0, tag + " psi > 0");
      c.require(shell < tol::shell, tag + " boundary shell");
      c.require(res->relative_residual_l2 < tol::residual, tag + " residual");
    }
  }
}

void small_bump_absent(Check& c) {
  const SpatialGrid g(3, 10.0, 48);
  const auto kernel = DispersalKernel::gaussian(1.0, 3);
  const auto pot = Potential::build(PotentialShape::bump(0.2, 0.5), g);
  const SolverConfig cfg;
  const auto out = find_ground_state(kernel, pot, cfg);
  c.require(!found(out), "NotFound");
  std::vector<double> lambdas;
  for (int i = 0; i <= 20; ++i) lambdas.push_back(cfg.lambda_min * std::pow(2.0 / cfg.lambda_min, i / 20.0));
  const auto curve = scan_r(kernel, pot.field(), lambdas, cfg);
  double rmax = 0.0;
  for (const auto& [l, r] : curve) rmax = std::max(rmax, r);
  c.note("max r over [" + sci(cfg.lambda_min) + ", 2] = " + sci(rmax));
  if (!found(out)) c.note("r(lambda_min) " + sci(not_found(out).r_at_lambda_min));
  c.require(rmax < 1.0, "r < 1 on scan");
}

void rayleigh_sweep(Check& c) {
  const SpatialGrid g(1, 20.0, 512);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  const double beta = 0.5;
  std::vector<QuadraticFormTest> tests;
  for (double R : {1.0, 2.0, 4.0, 8.0}) tests.push_back(rayleigh_quotient_test(kernel, g, beta, R));
  bool decreasing = true;
  std::ostringstream ratios;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    ratios << (i ? "," : "") << sci(tests[i].dissipation_ratio);
    if (i) decreasing = decreasing && tests[i].dissipation_ratio < tests[i - 1].dissipation_ratio;
  }
  c.note("dissipation ratios " + ratios.str());
  c.require(decreasing, "ratio decreasing");
  c.require(tests.back().dissipation_ratio < 0.1, "ratio at R=8 below 0.1");

  const double radii[] = {1.0, 2.0, 4.0, 8.0};
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (!(tests[i].form_value > 0.0)) continue;
    const auto pot = Potential::build(PotentialShape::plateau(beta, radii[i]), g);
    const auto res = record_found(find_ground_state(kernel, pot), "plateau d=1 R=" + format_double(radii[i]));
    c.require(res.has_value(), "Found at smallest positive R");
    if (!res) return;
    const double lower = tests[i].form_value / tests[i].volume;
    c.note("R=" + format_double(radii[i]) + ": lambda0 " + sci(res->lambda0) + " >= form/vol " + sci(lower));
    c.require(res->lambda0 >= lower - tol::form_slack, "lambda0 above form/vol");
    return;
  }
  c.require(false, "no R with positive form");
}

void weak_bump(Check& c) {
  const SolverConfig cfg;
  struct Case {
    std::string name;
    SpatialGrid grid;
  };
  for (const auto& cs : {Case{"d=1", SpatialGrid(1, 20.0, 512)}, Case{"d=2", SpatialGrid(2, 20.0, 128)}}) {
    const auto kernel = DispersalKernel::gaussian(1.0, cs.grid.dim());
    const auto pot = Potential::build(PotentialShape::bump(0.1, 1.0), cs.grid);
    const auto report = theorem1_applicability(kernel, cs.grid, pot.field());
    const auto out = find_ground_state(kernel, pot, cfg);
    const auto res = record_found(out, "bump " + cs.name);
    c.require(report.applicable, cs.name + " hypotheses");
    c.require(res.has_value(), cs.name + " Found");
    // On a periodic box the constant test function gives lambda0 >= mean(V).
    const double floor = integral(pot.field()) / std::pow(2.0 * cs.grid.half_width(), cs.grid.dim());
    if (!res) {
      c.note(cs.name + ": r(lambda_min) " + sci(not_found(out).r_at_lambda_min) + ", box floor mean(V) " + sci(floor));
      continue;
    }
    c.note(cs.name + ": lambda0 " + sci(res->lambda0) + ", box floor mean(V) " + sci(floor));
    c.require(res->lambda0 > cfg.lambda_min, cs.name + " above lambda_min");
  }
}

void paradise_bound(Check& c) {
  const SpatialGrid g(1, 20.0, 512);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  double worst = std::numeric_limits<double>::infinity();
  for (double delta : {0.25, 0.5})
    for (double lambda : {0.1, 0.5, 0.9}) {
      const auto b = paradise_lower_bound(kernel, g, delta, lambda);
      worst = std::min(worst, b.ratio);
      c.require(b.ratio >= tol::paradise_ratio,
                "delta=" + format_double(delta) + " lambda=" + format_double(lambda));
    }
  c.note("min ratio " + sci(worst));
}

void subcritical(Check& c) {
  const SpatialGrid g(1, 20.0, 512);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  const auto sub = SubcriticalPotential::build(1.5, PotentialShape::plateau(1.5, 0.5), g);
  const auto out = find_ground_state_subcritical(kernel, sub);
  c.require(found(out), "Found");
  if (found(out)) {
    const auto& res = result(out);
    const auto dense = dense_oracle(sample(kernel, g), sub.mortality());
    const double de = std::abs(res.lambda_hat() - dense.top_eigenvalue);
    c.note("lambda_hat " + sci(res.lambda_hat()) + ", root " + format_double(res.lambda0) + ", |diff| " + sci(de));
    c.require(res.lambda_hat() > 0.0, "lambda_hat > 0");
    c.require(res.lambda0 > sub.h(), "root above h");
    c.require(de < tol::oracle_eigenvalue, "dense agreement");
  }

  const auto flat = SubcriticalPotential::build(1.5, PotentialShape::zero(), g);
  const auto a = sample(kernel, g);
  const auto m = flat.mortality();
  std::mt19937 rng(2024);
  std::normal_distribution<double> n01;
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(g.size());
    for (auto& x : v) x = n01(rng);
    const Field u(g, std::move(v));
    const double uu = inner_product(u, u);
    worst = std::max(worst, (inner_product(apply_L(m, a, u), u) + flat.h() * uu) / uu);
  }
  c.note("max (Lu,u)/|u|^2 + h = " + sci(worst));
  c.require(worst <= tol::subcritical_form, "quadratic form");
}

void growth(Check& c) {
  const SpatialGrid g(1, 20.0, 512);
  const auto kernel = DispersalKernel::gaussian(1.0, 1);
  const auto pot = Potential::build(PotentialShape::paradise_ball(0.5), g);
  const auto res = record_found(find_ground_state(kernel, pot), "paradise d=1 evolve");
  c.require(res.has_value(), "Found");
  if (res) {
    const Field u0 = gaussian_bump(g, 0.0, 1.0);
    EvolutionRun run{.u0 = u0, .t_end = 40.0, .dt = 0.05, .reference = res->psi};
    const auto s = evolve(run, kernel, pot.mortality());
    const auto fit = growth_fit(s);
    const auto& psi = res->psi;
    const double predicted = inner_product(u0, psi) * integral(psi) / inner_product(psi, psi);
    const double slope_err = std::abs(fit.slope - res->lambda0) / res->lambda0;
    const double pre_err = std::abs(fit.prefactor() - predicted) / predicted;
    const double dist = s.points.back().shape_distance;
    c.note("slope rel err " + sci(slope_err) + ", shape distance " + sci(dist) + ", prefactor rel err " +
           sci(pre_err));
    c.require(slope_err < tol::slope_rel, "slope");
    c.require(dist < tol::shape_distance, "shape distance");
    c.require(pre_err < tol::prefactor_rel, "prefactor");
  }

  EvolutionRun null_run{.u0 = gaussian_bump(g, 0.0, 1.0), .t_end = 10.0, .dt = 0.05};
  const double slope = growth_rate(evolve(null_run, kernel, Field::zeros(g)));
  c.note("m=0 slope " + format_double(slope));
  c.require(std::abs(slope - 1.0) < tol::null_slope, "null mortality slope");

  std::size_t inside = 0;
  for (const auto& [label, l] : critical_found) {
    if (l > 0.0 && l <= 1.0) ++inside;
    else c.require(false, label + " lambda0 outside (0,1]");
  }
  c.note(std::to_string(inside) + "/" + std::to_string(critical_found.size()) + " Found results in (0,1]");
}

void symmetric_equivalence(Check& c) {
  struct Case {
    std::string name;
    double lambda;
    SpatialGrid grid;
    PotentialShape shape;
  };
  const std::vector<Case> cases{
      {"paradise d=1 lambda=0.5", 0.5, SpatialGrid(1, 10.0, 128), PotentialShape::paradise_ball(0.5)},
      {"plateau d=1 lambda=0.2", 0.2, SpatialGrid(1, 20.0, 256), PotentialShape::plateau(0.5, 2.0)},
      {"paradise d=2 lambda=1", 1.0, SpatialGrid(2, 5.0, 32), PotentialShape::paradise_ball(1.0)}};
  for (const auto& cs : cases) {
    const auto kernel = DispersalKernel::gaussian(1.0, cs.grid.dim());
    const auto pot = Potential::build(cs.shape, cs.grid);
    const BirmanSchwingerOp op(build_resolvent(cs.lambda, kernel, cs.grid), pot.field());
    const double r = spectral_radius(op).r;
    const Eigen::MatrixXd s = dense::S_hat_matrix(op);
    const double defect = (s - s.transpose()).cwiseAbs().maxCoeff();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    c.note(cs.name + ": |r - top| " + sci(std::abs(r - top)) + ", defect " + sci(defect));
    c.require(std::abs(r - top) < tol::s_hat_eigenvalue, cs.name + " eigenvalue");
    c.require(defect < tol::s_hat_symmetry, cs.name + " symmetry");
  }
}

void kernel_suite(Check& c) {
  std::mt19937 rng(12);
  double conv = 0.0;
  for (const auto& g : {SpatialGrid(1, 8.0, 64), SpatialGrid(2, 6.0, 32)}) {
    for (auto k : {DispersalKernel::gaussian(1.0, g.dim()), DispersalKernel::tent(1.5, g.dim())}) {
      const auto a = sample(k, g);
      const auto f = random_field(g, rng);
      conv = std::max(conv, max_abs_diff(convolve(a, f), direct_convolution(a, f)));
    }
  }
  c.note("convolution vs direct " + sci(conv));
  c.require(conv < tol::direct_sum, "convolution");

  bool origin_exact = true;
  double sup_excess = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const SpatialGrid g(d, 6.0, d == 3 ? 16 : 64);
    for (auto k : {DispersalKernel::gaussian(1.0, d), DispersalKernel::exponential(0.7, d),
                   DispersalKernel::tent(1.5, d), DispersalKernel::heavy_tail(1.0, d)}) {
      std::vector<SymbolMode> modes{SymbolMode::sampled};
      if (k.family() != KernelFamily::heavy_tail) modes.push_back(SymbolMode::analytic);
      for (auto mode : modes) {
        const auto s = symbol(k, g, mode);
        origin_exact = origin_exact && s[0] == 1.0;
        for (double v : s.values()) sup_excess = std::max(sup_excess, std::abs(v) - 1.0);
      }
    }
  }
  c.note("max |a~| - 1 = " + sci(sup_excess));
  c.require(origin_exact, "a~(0) = 1");
  c.require(sup_excess <= 0.0, "|a~| <= 1");

  bool positive = true, monotone = true;
  for (int d = 1; d <= 2; ++d) {
    const SpatialGrid g(d, 8.0, d == 1 ? 256 : 64);
    const auto k = DispersalKernel::gaussian(1.0, d);
    std::optional<Field> prev;
    for (double lam : {0.25, 0.5, 1.0, 2.0}) {
      const auto r = build_resolvent(lam, k, g);
      positive = positive && r.spatial().min() > 0.0;
      if (prev)
        for (std::size_t i = 0; i < g.size(); ++i) monotone = monotone && r.spatial()[i] <= (*prev)[i];
      prev = r.spatial();
    }
  }
  c.require(positive, "G > 0");
  c.require(monotone, "G monotone in lambda");

  double identity = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const SpatialGrid g(d, 8.0, d == 3 ? 16 : 64);
    const auto kernel = DispersalKernel::gaussian(1.0, d);
    const auto a = sample(kernel, g);
    const auto one = Field::constant(g, 1.0);
    for (double lam : {0.1, 1.0}) {
      const auto r = build_resolvent(lam, kernel, g);
      const auto f = random_field(g, rng);
      const auto u = (1.0 / (lam + 1.0)) * (f + apply_A(r, f));
      identity = std::max(identity, max_abs_diff(lam * u - apply_L(one, a, u), f));
    }
  }
  c.note("resolvent identity defect " + sci(identity));
  c.require(identity < tol::resolvent_identity, "resolvent identity");
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "discrete criticality", 5, criticality},
      {2, "oracle equivalence d=1", 30, oracle_equivalence},
      {3, "r(Q_lambda) strictly decreasing", 180, monotone_radius},
      {4, "small paradise d=3", 300, small_paradise},
      {5, "small bump absent d=3", 120, small_bump_absent},
      {6, "Rayleigh test sweep", 60, rayleigh_sweep},
      {7, "weak bump d=1,2", 120, weak_bump},
      {8, "paradise lower bound", 30, paradise_bound},
      {9, "subcritical background", 60, subcritical},
      {10, "growth at rate lambda0", 120, growth},
      {11, "symmetrized operator", 60, symmetric_equivalence},
      {12, "kernel and transform suite", 30, kernel_suite},
  };
  int passed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < cr.budget_seconds, "runtime");
    if (c.ok()) ++passed;
    char head[96];
    std::snprintf(head, sizeof head, "%s [%2d] %-32s (%.1f s / %.0f s) ", c.ok() ? "PASS" : "FAIL", cr.id,
                  cr.name.c_str(), secs, cr.budget_seconds);
    std::cout << head << c.summary() << std::endl;
  }
  std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
