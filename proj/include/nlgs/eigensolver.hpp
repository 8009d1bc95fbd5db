#pragma once

// Principal eigenpair of L = L₀ + V through the fixed point Q_λ ψ = ψ:
// power iteration for r(Q_λ), monotone bracketing/bisection of r(Q_λ) = 1,
// and a dense shifted-power-iteration oracle on the materialized L.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlgs/birman_schwinger.hpp"
#include "nlgs/dense.hpp"
#include "nlgs/dispersal.hpp"
#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"
#include "nlgs/potential.hpp"

namespace nlgs {

enum class Normalization { sup, l2 };

struct PowerIterConfig {
  int max_iters = 5000;
  double eigenvalue_tol = 1e-12;
  double residual_tol = 1e-10;
  /// Defaults to sup for cb and l2 for l2_symmetric when unset.
  std::optional<Normalization> normalization;
};

struct SolverConfig {
  PowerIterConfig power;
  OperatorMode mode = OperatorMode::cb;
  SymbolMode symbol_mode = SymbolMode::sampled;
  double lambda_min = 1e-4;
  double bracket_width = 1e-10;
  /// Iterations of deflated power iteration for the spectral-gap diagnostic (0 disables).
  int gap_iters = 200;
};

struct SpectralRadius {
  double r = 0.0;
  /// Normalized positive eigenfield of the iterated operator.
  Field eigenfield;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline Normalization normalization_for(const BirmanSchwingerOp& op, const PowerIterConfig& cfg) {
  if (cfg.normalization) return *cfg.normalization;
  return op.mode() == OperatorMode::cb ? Normalization::sup : Normalization::l2;
}

inline double norm_in(const Field& f, Normalization n) { return n == Normalization::sup ? sup_norm(f) : l2_norm(f); }

inline Field normalized(const Field& f, Normalization n) {
  const double s = norm_in(f, n);
  if (!(s > 0.0)) throw NumericalError("cannot normalize a zero field");
  return (1.0 / s) * f;
}

// Rayleigh quotient under which the iterated operator is self-adjoint:
// weight μ = V (λ + 1 - V) for Q_λ, the plain L2 pairing for Ŝ_λ.
inline double rayleigh(const BirmanSchwingerOp& op, std::span<const double> weight, const Field& f, const Field& g) {
  if (op.mode() == OperatorMode::l2_symmetric) return inner_product(f, g) / inner_product(f, f);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += weight[i] * f[i] * g[i];
    den += weight[i] * f[i] * f[i];
  }
  return num / den;
}

inline std::vector<double> rayleigh_weight(const BirmanSchwingerOp& op) {
  const auto& v = op.potential();
  const double lp1 = op.lambda() + 1.0;
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = v[i] * (lp1 - v[i]);
  return w;
}

inline double ratio_spread(const Field& f, const Field& g) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const double floor = 1e-8 * sup_norm(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) <= floor) continue;
    const double q = g[i] / f[i];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return hi - lo;
}

}  // namespace detail

/// Power iteration for the dominant eigenvalue of Q_λ (cb) or Ŝ_λ (l2_symmetric).
/// Converged when successive estimates agree to eigenvalue_tol (relative) and
/// ||T f - r f|| < residual_tol * max(1, r) for the normalized iterate f.
/// Starts from the constant field unless `start` is given (it must be positive).
inline SpectralRadius spectral_radius(const BirmanSchwingerOp& op, const PowerIterConfig& cfg = {},
                                      const std::optional<Field>& start = std::nullopt) {
  if (cfg.max_iters <= 0 || !(cfg.eigenvalue_tol > 0.0) || !(cfg.residual_tol > 0.0))
    throw InvalidArgument("power iteration tolerances must be positive");
  const auto& grid = op.potential().grid();
  const auto norm = detail::normalization_for(op, cfg);
  Field f = detail::normalized(start ? *start : Field::constant(grid, 1.0), norm);
  if (op.potential_is_zero()) return {0.0, f, 0, 0.0};

  const auto weight = detail::rayleigh_weight(op);
  double r_prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Field g = op.apply(f);
    const double r = detail::rayleigh(op, weight, f, g);
    const double residual = detail::norm_in(zip(g, f, [r](double a, double b) { return a - r * b; }), norm);
    const bool eig_ok = std::abs(r - r_prev) <= cfg.eigenvalue_tol * std::abs(r);
    if (eig_ok && residual < cfg.residual_tol * std::max(1.0, std::abs(r))) return {r, f, it, residual};
    const double gn = detail::norm_in(g, norm);
    if (!(gn > 0.0)) return {0.0, f, it, 0.0};
    if (it == cfg.max_iters)
      throw NumericalError("power iteration did not converge in " + std::to_string(cfg.max_iters) +
                           " iterations (lambda " + format_double(op.lambda()) + ", last ratio spread " +
                           format_double(detail::ratio_spread(f, g)) + ", residual " + format_double(residual) + ")");
    f = (1.0 / gn) * g;
    r_prev = r;
  }
  return {r_prev, f, cfg.max_iters, 0.0};
}

struct Bracket {
  double lower;
  double upper;
};

struct EigenpairResult {
  /// Root of r(Q_λ) = 1. For the subcritical problem the operator eigenvalue is lambda0 - h.
  double lambda0 = 0.0;
  double h = 0.0;
  /// Ground state, normalized in the mode norm (sup for cb, l2 for l2_symmetric).
  Field psi;
  std::vector<std::pair<double, double>> r_curve;
  double residual_sup = 0.0;
  double residual_l2 = 0.0;
  double relative_residual_l2 = 0.0;
  int power_iterations_total = 0;
  int power_iterations_final = 0;
  /// Second over first eigenvalue of the iterated operator at the root (diagnostic).
  double spectral_gap_ratio = 0.0;
  Bracket bracket{0.0, 0.0};
  std::vector<Bracket> bracket_history{};

  double lambda_hat() const { return lambda0 - h; }
};

struct NotFound {
  double lambda_min = 0.0;
  double r_at_lambda_min = 0.0;
  std::vector<std::pair<double, double>> r_curve;
};

using GroundStateOutcome = std::variant<EigenpairResult, NotFound>;

inline bool found(const GroundStateOutcome& o) { return std::holds_alternative<EigenpairResult>(o); }
inline const EigenpairResult& result(const GroundStateOutcome& o) { return std::get<EigenpairResult>(o); }
inline const NotFound& not_found(const GroundStateOutcome& o) { return std::get<NotFound>(o); }

namespace detail {

// Solves (L₀ + V) ψ = λ ψ with λ > h via r(Q_λ) = 1. h = 0 is the ordinary
// problem; h > 0 is the shifted subcritical one, where the eigenvalue of
// L = L₀ + V - h is λ - h.
inline GroundStateOutcome solve_shifted(const DispersalKernel& kernel, const Field& v, double h,
                                        const SolverConfig& cfg) {
  const auto& grid = v.grid();
  if (kernel.dim() != grid.dim()) throw InvalidArgument("kernel dim does not match grid dim");
  if (!(cfg.lambda_min > 0.0) || !(cfg.bracket_width > 0.0)) throw InvalidArgument("bad bracket configuration");
  const Field a_hat = symbol(kernel, grid, cfg.symbol_mode);
  std::vector<std::pair<double, double>> curve;
  int total_iters = 0;
  std::optional<Field> warm;

  auto evaluate = [&](double lambda) {
    BirmanSchwingerOp op(ResolventKernel(lambda, a_hat), v, cfg.mode);
    auto sr = spectral_radius(op, cfg.power, warm);
    total_iters += sr.iterations;
    if (sr.r > 0.0) warm = sr.eigenfield;
    curve.emplace_back(lambda, sr.r);
    return sr.r;
  };

  const double lam_min = h + cfg.lambda_min;
  const double r_min = evaluate(lam_min);
  auto sorted_curve = [&] {
    auto c = curve;
    std::sort(c.begin(), c.end());
    return c;
  };
  if (!(r_min > 1.0)) return NotFound{lam_min, r_min, sorted_curve()};

  Bracket br{lam_min, 0.0};
  std::vector<Bracket> history;
  double offset = 1.0;
  for (;;) {
    const double lam = h + offset;
    if (evaluate(lam) < 1.0) {
      br.upper = lam;
      break;
    }
    br.lower = lam;
    offset *= 2.0;
    if (offset > 1e6) throw NumericalError("no upper bracket: r(Q_lambda) stays >= 1");
  }
  history.push_back(br);
  while (br.upper - br.lower >= cfg.bracket_width) {
    const double mid = 0.5 * (br.lower + br.upper);
    if (mid <= br.lower || mid >= br.upper) break;
    if (evaluate(mid) > 1.0) br.lower = mid;
    else br.upper = mid;
    history.push_back(br);
  }

  EigenpairResult res{.lambda0 = 0.5 * (br.lower + br.upper), .h = h, .psi = Field::zeros(grid), .r_curve = {}};
  BirmanSchwingerOp op(ResolventKernel(res.lambda0, a_hat), v, cfg.mode);
  const auto sr = spectral_radius(op, cfg.power, warm);
  total_iters += sr.iterations;
  const auto norm = normalization_for(op, cfg.power);
  Field psi = cfg.mode == OperatorMode::cb ? sr.eigenfield : op.psi_from_symmetric(sr.eigenfield);
  res.psi = normalized(psi, norm);

  const Field mortality = v.map([h](double x) { return 1.0 + h - x; });
  const NonlocalOperator L(sample(kernel, grid), mortality);
  const double eig = res.lambda_hat();
  const Field resid = zip(L.apply(res.psi), res.psi, [eig](double a, double b) { return a - eig * b; });
  res.residual_sup = sup_norm(resid);
  res.residual_l2 = l2_norm(resid);
  res.relative_residual_l2 = res.residual_l2 / l2_norm(res.psi);
  res.power_iterations_final = sr.iterations;
  res.power_iterations_total = total_iters;
  res.bracket = br;
  res.bracket_history = std::move(history);

  if (cfg.gap_iters > 0) {
    // Deflated power iteration in the inner product that makes the operator self-adjoint.
    const auto weight = rayleigh_weight(op);
    const Field& top = sr.eigenfield;
    auto pair = [&](const Field& x, const Field& y) {
      if (cfg.mode == OperatorMode::l2_symmetric) return inner_product(x, y);
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += weight[i] * x[i] * y[i];
      return s;
    };
    const double tt = pair(top, top);
    auto deflate = [&](const Field& x) {
      const double c = pair(top, x) / tt;
      return zip(x, top, [c](double a, double b) { return a - c * b; });
    };
    Field f = deflate(Field::from_function(grid, [](const Point& x) { return 1.0 + 0.5 * std::sin(1.3 * x[0] + 0.7); }));
    double r2 = 0.0;
    for (int it = 0; it < cfg.gap_iters; ++it) {
      const double fn = std::sqrt(std::max(pair(f, f), 0.0));
      if (!(fn > 0.0)) break;
      f = (1.0 / fn) * f;
      const Field g = deflate(op.apply(f));
      r2 = pair(f, g);
      f = g;
    }
    res.spectral_gap_ratio = sr.r > 0.0 ? std::abs(r2) / sr.r : 0.0;
  }
  res.r_curve = sorted_curve();
  return res;
}

}  // namespace detail

/// Principal eigenpair of L = L₀ + V, or NotFound when r(Q_λ) <= 1 already at λ_min.
inline GroundStateOutcome find_ground_state(const DispersalKernel& kernel, const Potential& potential,
                                            const SolverConfig& cfg = {}) {
  return detail::solve_shifted(kernel, potential.field(), 0.0, cfg);
}

/// r(Q_λ) over an ascending list; throws if r increases by more than 1e-10.
inline std::vector<std::pair<double, double>> scan_r(const DispersalKernel& kernel, const Field& potential,
                                                     std::span<const double> lambdas, const SolverConfig& cfg = {}) {
  const auto& grid = potential.grid();
  const Field a_hat = symbol(kernel, grid, cfg.symbol_mode);
  std::vector<std::pair<double, double>> out;
  std::optional<Field> warm;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas[i];
    if (!(lam > 0.0)) throw InvalidArgument("scan lambdas must be positive");
    if (i > 0 && !(lam > lambdas[i - 1])) throw InvalidArgument("scan lambdas must be strictly ascending");
    BirmanSchwingerOp op(ResolventKernel(lam, a_hat), potential, cfg.mode);
    const auto sr = spectral_radius(op, cfg.power, warm);
    if (sr.r > 0.0) warm = sr.eigenfield;
    if (!out.empty() && sr.r > out.back().second + 1e-10)
      throw NumericalError("r(Q_lambda) increased between lambda " + format_double(out.back().first) + " and " +
                           format_double(lam));
    out.emplace_back(lam, sr.r);
  }
  return out;
}

struct DenseEigenpair {
  double top_eigenvalue = 0.0;
  /// Unit L2-norm eigenvector with positive sum.
  Field eigenvector;
  int iterations = 0;
};

/// Largest eigenvalue of the materialized L = a * · - m by power iteration on
/// L + c I with c = 1 + sup m, from the constant start vector.
inline DenseEigenpair dense_oracle(const Field& kernel_sample, const Field& mortality, int max_iters = 200000,
                                   double residual_tol = 1e-12) {
  const auto& grid = mortality.grid();
  dense::require_size_cap(grid);
  const Eigen::MatrixXd l = dense::L_matrix(kernel_sample, mortality);
  const double c = 1.0 + std::max(0.0, mortality.max());
  Eigen::MatrixXd shifted = l;
  shifted.diagonal().array() += c;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(l.rows()).normalized();
  double theta = 0.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::VectorXd w = shifted * v;
    theta = v.dot(w);
    const double residual = (w - theta * v).norm();
    v = w.normalized();
    if (residual < residual_tol * std::max(1.0, theta)) break;
  }
  if (it == max_iters) throw NumericalError("dense oracle power iteration did not converge");
  if (v.sum() < 0.0) v = -v;
  // Rayleigh quotient of L itself at the converged vector.
  const double top = v.dot(l * v);
  // Scale to unit L2 norm in the quadrature pairing.
  const Field ev = dense::to_field(grid, v);
  return {top, (1.0 / l2_norm(ev)) * ev, it + 1};
}

}  // namespace nlgs
