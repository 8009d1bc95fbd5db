#pragma once

// Explicit RK4 integration of ∂u/∂t = L u with total-mass, local-mass and
// shape diagnostics, and the growth-rate fit over the second half of a run.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nlgs/birman_schwinger.hpp"
#include "nlgs/dispersal.hpp"
#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"

namespace nlgs {

struct EvolutionRun {
  Field u0;
  double t_end = 10.0;
  double dt = 0.05;
  std::vector<double> snapshot_times;
  /// Shape reference (normally the ground state); shape_distance is NaN without it.
  std::optional<Field> reference;
  /// Radius of the interior ball D used for the local-mass series.
  double local_radius = 1.0;
};

struct SeriesPoint {
  double t = 0.0;
  double mass = 0.0;
  double log_mass = 0.0;
  double shape_distance = std::numeric_limits<double>::quiet_NaN();
  double local_mass = 0.0;
  /// min u / sup u at this time; negative values measure positivity loss.
  double min_relative = 0.0;
};

struct EvolutionSeries {
  std::vector<SeriesPoint> points;
  std::vector<std::pair<double, Field>> snapshots;
  Field final_state;
};

/// ‖u/‖u‖₂ - ψ/‖ψ‖₂‖₂, with both fields sign-fixed to positive total mass.
inline double shape_distance(const Field& u, const Field& psi) {
  require_same_grid(u, psi, "shape_distance");
  const double nu = l2_norm(u), np = l2_norm(psi);
  if (!(nu > 0.0) || !(np > 0.0)) throw InvalidArgument("shape_distance of a zero field");
  const double su = integral(u) < 0.0 ? -1.0 : 1.0;
  const double sp = integral(psi) < 0.0 ? -1.0 : 1.0;
  const double cu = su / nu, cp = sp / np;
  return l2_norm(zip(u, psi, [cu, cp](double a, double b) { return cu * a - cp * b; }));
}

namespace detail {

inline double ball_mass(const Field& u, double radius) {
  const auto& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (g.radius(i) <= radius) s += u[i];
  return g.cell_volume() * s;
}

inline SeriesPoint observe(double t, const Field& u, const EvolutionRun& run) {
  SeriesPoint p;
  p.t = t;
  p.mass = integral(u);
  p.log_mass = p.mass > 0.0 ? std::log(p.mass) : std::numeric_limits<double>::quiet_NaN();
  if (run.reference) p.shape_distance = shape_distance(u, *run.reference);
  p.local_mass = ball_mass(u, run.local_radius);
  const double top = sup_norm(u);
  p.min_relative = top > 0.0 ? u.min() / top : 0.0;
  return p;
}

}  // namespace detail

/// Classic fourth-order Runge-Kutta with step t_end / ceil(t_end / dt).
inline EvolutionSeries evolve(const EvolutionRun& run, const Field& kernel_sample, const Field& mortality) {
  require_same_grid(run.u0, mortality, "evolve");
  if (run.u0.min() < 0.0) throw InvalidArgument("initial density must be nonnegative");
  if (!(run.u0.max() > 0.0)) throw InvalidArgument("initial density must not vanish identically");
  if (!(run.t_end > 0.0) || !(run.dt > 0.0)) throw InvalidArgument("t_end and dt must be positive");
  const double sup_m = std::max(0.0, mortality.max());
  if (run.dt > 0.2 / (1.0 + sup_m) * (1.0 + 1e-12))
    throw InvalidArgument("dt exceeds the stability margin 0.2 / (1 + sup m) = " + format_double(0.2 / (1.0 + sup_m)));

  const NonlocalOperator L(kernel_sample, mortality);
  const auto steps = static_cast<long>(std::ceil(run.t_end / run.dt - 1e-9));
  const double h = run.t_end / static_cast<double>(steps);
  const double growth_cap = std::exp(2.0 * h * (1.0 + sup_m));

  EvolutionSeries out{.points = {}, .snapshots = {}, .final_state = run.u0};
  Field u = run.u0;
  out.points.push_back(detail::observe(0.0, u, run));
  std::vector<bool> taken(run.snapshot_times.size(), false);
  auto take_snapshots = [&](double t) {
    for (std::size_t k = 0; k < run.snapshot_times.size(); ++k)
      if (!taken[k] && std::abs(run.snapshot_times[k] - t) <= 0.5 * h) {
        out.snapshots.emplace_back(run.snapshot_times[k], u);
        taken[k] = true;
      }
  };
  take_snapshots(0.0);

  for (long s = 1; s <= steps; ++s) {
    const Field k1 = L.apply(u);
    const Field k2 = L.apply(u + (0.5 * h) * k1);
    const Field k3 = L.apply(u + (0.5 * h) * k2);
    const Field k4 = L.apply(u + h * k3);
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double prev_mass = out.points.back().mass;
    u = Field(u.grid(), std::move(next));
    const double t = static_cast<double>(s) * h;
    out.points.push_back(detail::observe(t, u, run));
    if (out.points.back().mass > growth_cap * prev_mass)
      throw NumericalError("evolution unstable at t = " + format_double(t));
    take_snapshots(t);
  }
  out.final_state = u;
  return out;
}

inline EvolutionSeries evolve(const EvolutionRun& run, const DispersalKernel& kernel, const Field& mortality) {
  return evolve(run, sample(kernel, mortality.grid()), mortality);
}

struct GrowthFit {
  double slope;
  double intercept;
  /// exp(intercept): the fitted prefactor of mass(t) ≈ C e^{slope t}.
  double prefactor() const { return std::exp(intercept); }
};

/// Least-squares line through (t, log mass) on the window [t_end/2, t_end].
inline GrowthFit growth_fit(std::span<const double> t, std::span<const double> mass) {
  if (t.size() != mass.size() || t.empty()) throw InvalidArgument("growth_fit needs matching nonempty series");
  const double t_end = t.back();
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0.5 * t_end) continue;
    if (!(mass[i] > 0.0)) throw NumericalError("nonpositive mass in growth-rate window");
    const double y = std::log(mass[i]);
    n += 1;
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  if (n < 2) throw InvalidArgument("growth-rate window holds fewer than two samples");
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return {slope, (sy - slope * st) / n};
}

inline GrowthFit growth_fit(const EvolutionSeries& series) {
  std::vector<double> t, m;
  for (const auto& p : series.points) {
    t.push_back(p.t);
    m.push_back(p.mass);
  }
  return growth_fit(t, m);
}

inline double growth_rate(const EvolutionSeries& series) { return growth_fit(series).slope; }
inline double growth_rate(std::span<const double> t, std::span<const double> mass) {
  return growth_fit(t, mass).slope;
}

}  // namespace nlgs
