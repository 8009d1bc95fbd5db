#pragma once

// Direct evaluators for the sufficient conditions behind the existence
// results: the paradise lower bound on Q_λ χ̂, the χ_{B_R} quadratic form,
// the second-moment/low-dimension applicability test, and the ε-scan of
// near-paradise plateaus.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "nlgs/birman_schwinger.hpp"
#include "nlgs/dense.hpp"
#include "nlgs/dispersal.hpp"
#include "nlgs/eigensolver.hpp"
#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"
#include "nlgs/potential.hpp"

namespace nlgs {

struct ParadiseBound {
  /// min over x ∈ B_δ of (Q_λ χ̂)(x).
  double min_q_chi = 0.0;
  /// vol(B_{0.9δ}) · min_{x,y ∈ B_δ} G_λ(x-y) / λ, with the discrete ball volume.
  double bound = 0.0;
  double min_g = 0.0;
  double volume_inner = 0.0;
  double ratio = 0.0;
};

/// Continuous approximation of the indicator of B_δ: 1 on B_{0.9δ}, 0 off B_δ, linear between.
inline Field smoothed_ball_indicator(const SpatialGrid& grid, double delta) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = grid.radius(i);
    v[i] = r <= 0.9 * delta ? 1.0 : std::clamp((delta - r) / (0.1 * delta), 0.0, 1.0);
  }
  return Field(grid, std::move(v));
}

inline ParadiseBound paradise_lower_bound(const DispersalKernel& kernel, const SpatialGrid& grid, double delta,
                                          double lambda, SymbolMode mode = SymbolMode::sampled) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("paradise_lower_bound needs lambda in (0, 1)");
  if (!(delta > 0.0)) throw InvalidArgument("paradise radius must be positive");
  const auto potential = Potential::build(PotentialShape::paradise_ball(delta), grid, 2.0 * kernel.length_scale());
  BirmanSchwingerOp op(build_resolvent(lambda, kernel, grid, mode), potential.field());
  const Field chi = smoothed_ball_indicator(grid, delta);
  const Field q_chi = op.apply_Q(chi);

  std::vector<std::size_t> ball;
  std::size_t inner = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.radius(i);
    if (r < delta) ball.push_back(i);
    if (r <= 0.9 * delta) ++inner;
  }
  ParadiseBound b;
  b.min_q_chi = std::numeric_limits<double>::infinity();
  b.min_g = std::numeric_limits<double>::infinity();
  const Field& g = op.resolvent().spatial();
  for (auto i : ball) {
    b.min_q_chi = std::min(b.min_q_chi, q_chi[i]);
    for (auto j : ball) b.min_g = std::min(b.min_g, g[dense::displacement_index(grid, i, j)]);
  }
  b.volume_inner = grid.cell_volume() * static_cast<double>(inner);
  b.bound = b.volume_inner * b.min_g / lambda;
  b.ratio = b.min_q_chi / b.bound;
  return b;
}

struct QuadraticFormTest {
  /// (L χ_R, χ_R) with V = plateau(β, R).
  double form_value = 0.0;
  /// -(L₀ χ_R, χ_R) / vol(B_R).
  double dissipation_ratio = 0.0;
  /// vol(B_R) = ‖χ_R‖₂² on the grid.
  double volume = 0.0;
};

inline QuadraticFormTest rayleigh_quotient_test(const DispersalKernel& kernel, const SpatialGrid& grid, double beta,
                                                double radius) {
  const auto potential = Potential::build(PotentialShape::plateau(beta, radius), grid, 2.0 * kernel.length_scale());
  const Field chi = Field::from_function(grid, [radius](const Point& x) {
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) <= radius ? 1.0 : 0.0;
  });
  const Field a = sample(kernel, grid);
  const Field l0_chi = convolve(a, chi) - chi;
  QuadraticFormTest t;
  t.volume = inner_product(chi, chi);
  const double dissipative = inner_product(l0_chi, chi);
  t.form_value = dissipative + inner_product(hadamard(potential.field(), chi), chi);
  t.dissipation_ratio = -dissipative / t.volume;
  return t;
}

struct Theorem1Report {
  bool dimension_ok = false;
  SecondMoment second_moment{};
  bool potential_nonzero = false;
  /// Curvature C in 1 - ã(p) ≈ pᵀ C p (+ D |p|⁴), row-major d×d.
  std::vector<double> curvature;
  double quartic_coefficient = 0.0;
  bool applicable = false;
};

/// Hypotheses of the low-dimension existence result: d ∈ {1, 2}, finite
/// second moment, V ≢ 0. The curvature is fitted by least squares over the
/// lowest five nonzero |k|² shells of the sampled symbol.
inline Theorem1Report theorem1_applicability(const DispersalKernel& kernel, const SpatialGrid& grid,
                                             const Field& potential) {
  Theorem1Report rep;
  const int d = grid.dim();
  rep.dimension_ok = d == 1 || d == 2;
  rep.second_moment = second_moment(kernel, grid);
  rep.potential_nonzero = sup_norm(potential) > 0.0;

  const Field a_hat = symbol(kernel, grid, SymbolMode::sampled);
  auto k2 = [&](std::size_t i) {
    const auto idx = grid.multi_index(i);
    long s = 0;
    for (int k = 0; k < d; ++k) {
      const long j = grid.signed_frequency_index(idx[k]);
      s += j * j;
    }
    return s;
  };
  std::set<long> shells;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (const long s = k2(i); s > 0) shells.insert(s);
  std::vector<long> lowest(shells.begin(), shells.end());
  lowest.resize(std::min<std::size_t>(5, lowest.size()));
  const long cutoff = lowest.back();

  std::vector<std::array<long, 2>> pairs;
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c) pairs.push_back({r, c});
  const auto unknowns = static_cast<Eigen::Index>(pairs.size() + 1);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (const long s = k2(i); s > 0 && s <= cutoff) rows.push_back(i);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), unknowns);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const auto p = grid.frequency_point(rows[q]);
    const auto row = static_cast<Eigen::Index>(q);
    for (std::size_t u = 0; u < pairs.size(); ++u) {
      const auto [r, c] = pairs[u];
      m(row, static_cast<Eigen::Index>(u)) = (r == c ? 1.0 : 2.0) * p[r] * p[c];
    }
    const double p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    m(row, unknowns - 1) = p2 * p2;
    y(row) = 1.0 - a_hat[rows[q]];
  }
  const Eigen::VectorXd sol = m.colPivHouseholderQr().solve(y);
  rep.curvature.assign(static_cast<std::size_t>(d * d), 0.0);
  for (std::size_t u = 0; u < pairs.size(); ++u) {
    const auto [r, c] = pairs[u];
    rep.curvature[r * d + c] = rep.curvature[c * d + r] = sol(static_cast<Eigen::Index>(u));
  }
  rep.quartic_coefficient = sol(unknowns - 1);
  rep.applicable = rep.dimension_ok && !rep.second_moment.effectively_infinite && rep.potential_nonzero;
  return rep;
}

struct EpsilonScanEntry {
  double epsilon;
  bool found;
  /// λ₀ when found, r(Q_{λ_min}) otherwise.
  double value;
};

struct EpsilonScan {
  std::vector<EpsilonScanEntry> entries;
  /// First ε (in scan order) at which no ground state is found.
  std::optional<double> transition_epsilon;
};

/// Near-paradise family V = plateau(1 - ε, δ), scanned over ascending ε.
inline EpsilonScan epsilon_scan(const DispersalKernel& kernel, const SpatialGrid& grid, double delta,
                                std::span<const double> epsilons, const SolverConfig& cfg = {}) {
  EpsilonScan scan;
  for (double eps : epsilons) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("epsilon must lie in [0, 1]");
    const auto potential =
        Potential::build(PotentialShape::plateau(1.0 - eps, delta), grid, 2.0 * kernel.length_scale());
    const auto out = find_ground_state(kernel, potential, cfg);
    if (found(out)) {
      scan.entries.push_back({eps, true, result(out).lambda0});
    } else {
      scan.entries.push_back({eps, false, not_found(out).r_at_lambda_min});
      if (!scan.transition_epsilon) scan.transition_epsilon = eps;
    }
  }
  return scan;
}

}  // namespace nlgs
