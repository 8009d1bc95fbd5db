#pragma once

// Mortality fluctuations V = 1 - m and the subcritical paradise Ṽ.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"

namespace nlgs {

enum class ShapeKind { zero, paradise_ball, plateau, bump };

inline std::string_view to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::zero: return "zero";
    case ShapeKind::paradise_ball: return "paradise_ball";
    case ShapeKind::plateau: return "plateau";
    case ShapeKind::bump: return "bump";
  }
  return "unknown";
}

inline std::optional<ShapeKind> shape_kind_from_string(std::string_view s) {
  if (s == "zero") return ShapeKind::zero;
  if (s == "paradise_ball") return ShapeKind::paradise_ball;
  if (s == "plateau") return ShapeKind::plateau;
  if (s == "bump") return ShapeKind::bump;
  return std::nullopt;
}

/// Radial profile description. `amplitude` is 1 for paradise_ball, β for
/// plateau and h₀ for bump; `radius` is δ or R.
struct PotentialShape {
  ShapeKind kind = ShapeKind::zero;
  double amplitude = 0.0;
  double radius = 0.0;

  static PotentialShape zero() { return {}; }
  static PotentialShape paradise_ball(double delta) { return {ShapeKind::paradise_ball, 1.0, delta}; }
  static PotentialShape plateau(double beta, double r) { return {ShapeKind::plateau, beta, r}; }
  static PotentialShape bump(double h0, double delta) { return {ShapeKind::bump, h0, delta}; }

  /// Outer radius of the support on the given grid (ramps add one cell).
  double support_radius(double spacing) const {
    switch (kind) {
      case ShapeKind::zero: return 0.0;
      case ShapeKind::paradise_ball:
      case ShapeKind::plateau: return radius + spacing;
      case ShapeKind::bump: return radius;
    }
    return 0.0;
  }

  /// Indicator-type shapes are full height on |x| <= radius and fall off
  /// linearly over one grid cell; the bump is the C-infinity
  /// h₀ exp(1 - 1/(1 - (|x|/δ)^2)).
  double value(double s, double spacing) const {
    switch (kind) {
      case ShapeKind::zero: return 0.0;
      case ShapeKind::paradise_ball:
      case ShapeKind::plateau: {
        if (s <= radius) return amplitude;
        return amplitude * std::clamp(1.0 - (s - radius) / spacing, 0.0, 1.0);
      }
      case ShapeKind::bump: {
        if (s >= radius) return 0.0;
        const double t = s / radius;
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
      }
    }
    return 0.0;
  }
};

struct PotentialDiagnostics {
  double min = 0.0;
  double max = 0.0;
  double support_radius = 0.0;
  double boundary_shell_max = 0.0;
  bool ok = true;
  std::string message;
};

/// Reports range, support radius and boundary-shell maximum of V. Fails when
/// V leaves [0, upper] beyond 1e-12 or touches the shell of the given width.
inline PotentialDiagnostics validate(const Field& v, double shell_width = 2.0, double upper = 1.0) {
  PotentialDiagnostics d;
  d.min = v.min();
  d.max = v.max();
  const auto& g = v.grid();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) d.support_radius = std::max(d.support_radius, g.radius(i));
  d.boundary_shell_max = boundary_shell_max(v, shell_width);
  if (d.max > upper + 1e-12) {
    d.ok = false;
    d.message = "potential exceeds its upper bound " + format_double(upper);
  } else if (d.min < -1e-12) {
    d.ok = false;
    d.message = "potential is negative";
  } else if (d.boundary_shell_max > 0.0) {
    d.ok = false;
    d.message = "potential support reaches the boundary shell";
  }
  return d;
}

namespace detail {

inline Field build_shape_field(const PotentialShape& shape, const SpatialGrid& grid, double cap, double margin) {
  if (!(shape.amplitude >= 0.0) || !std::isfinite(shape.amplitude))
    throw InvalidArgument("potential amplitude must be nonnegative");
  if (shape.amplitude > cap) throw InvalidArgument("potential amplitude " + format_double(shape.amplitude) +
                                                   " exceeds " + format_double(cap) + " (mortality would be negative)");
  if (shape.kind != ShapeKind::zero && !(shape.radius > 0.0)) throw InvalidArgument("potential radius must be positive");
  if (shape.support_radius(grid.spacing()) > grid.half_width() - margin)
    throw InvalidArgument("potential support touches the boundary margin");
  const double h = grid.spacing();
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = shape.value(grid.radius(i), h);
  Field f(grid, std::move(v));
  const auto diag = validate(f, margin, cap);
  if (!diag.ok) throw InvalidArgument(diag.message);
  return f;
}

}  // namespace detail

/// Fluctuation V = 1 - m with 0 <= V <= 1 and compact support.
class Potential {
 public:
  /// `margin` is the distance the support must keep from the box boundary,
  /// normally two kernel length scales.
  static Potential build(const PotentialShape& shape, const SpatialGrid& grid, double margin = 2.0) {
    return Potential(shape, detail::build_shape_field(shape, grid, 1.0, margin));
  }

  const PotentialShape& shape() const { return shape_; }
  const Field& field() const { return field_; }
  const SpatialGrid& grid() const { return field_.grid(); }
  /// Mortality m = 1 - V.
  Field mortality() const {
    return field_.map([](double v) { return 1.0 - v; });
  }

 private:
  Potential(PotentialShape s, Field f) : shape_(s), field_(std::move(f)) {}
  PotentialShape shape_;
  Field field_;
};

/// Background mortality m > 1 with a paradise-type perturbation
/// 0 <= Ṽ <= m; the local mortality is m̃ = m - Ṽ and D = Ṽ - h, h = m - 1.
class SubcriticalPotential {
 public:
  static SubcriticalPotential build(double m_level, const PotentialShape& shape, const SpatialGrid& grid,
                                    double margin = 2.0) {
    if (!(m_level > 1.0) || !std::isfinite(m_level)) throw InvalidArgument("subcritical level m must exceed 1");
    return SubcriticalPotential(m_level, shape, detail::build_shape_field(shape, grid, m_level, margin));
  }

  double m_level() const { return m_; }
  double h() const { return m_ - 1.0; }
  const PotentialShape& shape() const { return shape_; }
  /// Ṽ.
  const Field& field() const { return field_; }
  const SpatialGrid& grid() const { return field_.grid(); }
  Field mortality() const {
    const double m = m_;
    return field_.map([m](double v) { return m - v; });
  }

 private:
  SubcriticalPotential(double m, PotentialShape s, Field f) : m_(m), shape_(s), field_(std::move(f)) {}
  double m_;
  PotentialShape shape_;
  Field field_;
};

}  // namespace nlgs
