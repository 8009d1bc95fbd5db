#pragma once

// Birth dispersal kernels a(x): fixed radial families, sampling with exact
// unit discrete mass, analytic and sampled Fourier symbols, second moments.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"

namespace nlgs {

enum class KernelFamily { gaussian, exponential, tent, heavy_tail };
enum class SymbolMode { analytic, sampled };

inline std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::tent: return "tent";
    case KernelFamily::heavy_tail: return "heavy_tail";
  }
  return "unknown";
}

inline std::optional<KernelFamily> kernel_family_from_string(std::string_view s) {
  if (s == "gaussian") return KernelFamily::gaussian;
  if (s == "exponential") return KernelFamily::exponential;
  if (s == "tent") return KernelFamily::tent;
  if (s == "heavy_tail") return KernelFamily::heavy_tail;
  return std::nullopt;
}

namespace detail {

// Surface area of the unit sphere in R^d.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace detail

/// Even, nonnegative radial dispersal kernel. The parameter is σ (gaussian),
/// θ (exponential), the support radius r (tent) or the tail exponent α
/// (heavy_tail, density ∝ (1+|x|)^{-d-α}, α ∈ (0, 2]).
class DispersalKernel {
 public:
  DispersalKernel(KernelFamily family, double parameter, int dim) : family_(family), param_(parameter), dim_(dim) {
    if (dim < 1 || dim > 3) throw InvalidArgument("kernel dim must be 1, 2 or 3");
    if (!(parameter > 0.0) || !std::isfinite(parameter)) throw InvalidArgument("kernel parameter must be positive");
    if (family == KernelFamily::heavy_tail && parameter > 2.0)
      throw InvalidArgument("heavy_tail exponent must lie in (0, 2]");
  }

  static DispersalKernel gaussian(double sigma, int dim) { return {KernelFamily::gaussian, sigma, dim}; }
  static DispersalKernel exponential(double theta, int dim) { return {KernelFamily::exponential, theta, dim}; }
  static DispersalKernel tent(double radius, int dim) { return {KernelFamily::tent, radius, dim}; }
  static DispersalKernel heavy_tail(double alpha, int dim) { return {KernelFamily::heavy_tail, alpha, dim}; }

  KernelFamily family() const { return family_; }
  double parameter() const { return param_; }
  int dim() const { return dim_; }

  /// Characteristic length used for box-size and boundary-shell heuristics.
  double length_scale() const { return family_ == KernelFamily::heavy_tail ? 1.0 : param_; }

  /// Unnormalized radial profile.
  double profile(double s) const {
    switch (family_) {
      case KernelFamily::gaussian: return std::exp(-0.5 * s * s / (param_ * param_));
      case KernelFamily::exponential: return std::exp(-s / param_);
      case KernelFamily::tent: return s < param_ ? 1.0 - s / param_ : 0.0;
      case KernelFamily::heavy_tail: return std::pow(1.0 + s, -dim_ - param_);
    }
    return 0.0;
  }

  /// ∫_{R^d} profile(|x|) dx.
  double normalization_constant() const {
    const int d = dim_;
    const double sphere = detail::unit_sphere_area(d);
    switch (family_) {
      case KernelFamily::gaussian: return std::pow(2.0 * std::numbers::pi * param_ * param_, 0.5 * d);
      case KernelFamily::exponential: return sphere * std::pow(param_, d) * std::tgamma(d);
      case KernelFamily::tent: return sphere * std::pow(param_, d) / (d * (d + 1.0));
      case KernelFamily::heavy_tail: return sphere * std::tgamma(d) * std::tgamma(param_) / std::tgamma(d + param_);
    }
    return 1.0;
  }

  /// Continuum-normalized density a(x) with ∫ a = 1.
  double density(double s) const { return profile(s) / normalization_constant(); }

 private:
  KernelFamily family_;
  double param_;
  int dim_;
};

struct KernelSample {
  Field field;
  /// Δx^d Σ a(x_i) of the continuum-normalized density before renormalization.
  double raw_mass;
  double renormalization_factor() const { return 1.0 / raw_mass; }
};

/// Samples the kernel centred at the origin and rescales it to unit discrete mass.
inline KernelSample sample_with_report(const DispersalKernel& kernel, const SpatialGrid& grid) {
  if (kernel.dim() != grid.dim()) throw InvalidArgument("kernel dim does not match grid dim");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = kernel.density(grid.radius(i));
  double raw = 0.0;
  for (double x : v) raw += x;
  raw *= grid.cell_volume();
  if (!(raw >= 1e-12)) throw InvalidArgument("kernel is effectively zero on this grid");
  for (auto& x : v) x /= raw;
  return {Field(grid, std::move(v)), raw};
}

inline Field sample(const DispersalKernel& kernel, const SpatialGrid& grid) {
  return sample_with_report(kernel, grid).field;
}

/// Closed-form ã(|p|) for the gaussian, exponential and tent families.
inline double analytic_symbol_value(const DispersalKernel& kernel, double p) {
  const double q = kernel.parameter();
  const int d = kernel.dim();
  if (p == 0.0 && kernel.family() != KernelFamily::heavy_tail) return 1.0;
  switch (kernel.family()) {
    case KernelFamily::gaussian: return std::exp(-0.5 * q * q * p * p);
    case KernelFamily::exponential: return std::pow(1.0 + q * q * p * p, -0.5 * (d + 1));
    case KernelFamily::tent: {
      const double u = p * q;
      if (d == 1) {
        if (std::abs(u) < 1e-3) return 1.0 - u * u / 12.0 + u * u * u * u / 360.0;
        return 2.0 * (1.0 - std::cos(u)) / (u * u);
      }
      if (d == 3) {
        if (std::abs(u) < 1e-2) return 1.0 - u * u / 15.0 + u * u * u * u / 560.0;
        return 12.0 * (2.0 * (1.0 - std::cos(u)) - u * std::sin(u)) / (u * u * u * u);
      }
      // d = 2: Hankel transform 2π ∫_0^r (1 - s/r) J0(p s) s ds over the mass π r^2 / 3,
      // composite Gauss-Legendre with panels sized to the oscillation.
      std::vector<double> x, w;
      detail::gauss_legendre(16, x, w);
      const int panels = 8 + static_cast<int>(std::abs(u));
      const double h = q / panels;
      double acc = 0.0;
      for (int k = 0; k < panels; ++k) {
        const double a = k * h;
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double s = a + 0.5 * h * (x[j] + 1.0);
          acc += 0.5 * h * w[j] * (1.0 - s / q) * std::cyl_bessel_j(0.0, p * s) * s;
        }
      }
      return 2.0 * std::numbers::pi * acc / (std::numbers::pi * q * q / 3.0);
    }
    case KernelFamily::heavy_tail: break;
  }
  throw InvalidArgument("analytic symbol is not available for the heavy_tail family");
}

/// ã on the frequency lattice, returned in FFT order.
inline Field symbol(const DispersalKernel& kernel, const SpatialGrid& grid, SymbolMode mode) {
  if (kernel.dim() != grid.dim()) throw InvalidArgument("kernel dim does not match grid dim");
  if (mode == SymbolMode::analytic) {
    if (kernel.family() == KernelFamily::heavy_tail)
      throw InvalidArgument("analytic symbol is not available for the heavy_tail family");
    // Radial symbol: evaluate once per integer shell |k|^2.
    std::map<long, double> cache;
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto idx = grid.multi_index(i);
      long k2 = 0;
      for (int k = 0; k < grid.dim(); ++k) {
        const long j = grid.signed_frequency_index(idx[k]);
        k2 += j * j;
      }
      auto it = cache.find(k2);
      if (it == cache.end()) {
        const double p = std::numbers::pi * std::sqrt(static_cast<double>(k2)) / grid.half_width();
        it = cache.emplace(k2, analytic_symbol_value(kernel, p)).first;
      }
      v[i] = it->second;
    }
    return Field(grid, std::move(v));
  }
  const auto spec = kernel_spectrum(sample(kernel, grid));
  std::vector<double> v(spec.size());
  double imag = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    v[i] = spec[i].real();
    imag = std::max(imag, std::abs(spec[i].imag()));
  }
  if (imag > 1e-10) throw NumericalError("sampled symbol has imaginary residue " + std::to_string(imag));
  // The sample has unit discrete mass; the FFT only reproduces it to rounding.
  if (std::abs(v[0] - 1.0) > 1e-12) throw NumericalError("sampled symbol lost unit mass");
  v[0] = 1.0;
  return Field(grid, std::move(v));
}

struct SecondMoment {
  double value;
  /// Second moment on the doubled box (same spacing) over the value on this box.
  double doubling_ratio;
  bool effectively_infinite;
};

namespace detail {

inline double sampled_second_moment(const DispersalKernel& kernel, const SpatialGrid& grid) {
  double mass = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.radius(i);
    const double a = kernel.density(r);
    mass += a;
    moment += r * r * a;
  }
  return moment / mass;
}

}  // namespace detail

/// Δx^d Σ |x_i|^2 a(x_i) for the renormalized sample, plus a box-doubling
/// stability test: a ratio above 1.1 flags the moment as effectively infinite.
inline SecondMoment second_moment(const DispersalKernel& kernel, const SpatialGrid& grid) {
  if (kernel.dim() != grid.dim()) throw InvalidArgument("kernel dim does not match grid dim");
  const double base = detail::sampled_second_moment(kernel, grid);
  const SpatialGrid doubled(grid.dim(), 2.0 * grid.half_width(), 2 * grid.points_per_axis());
  const double wide = detail::sampled_second_moment(kernel, doubled);
  const double ratio = wide / base;
  return {base, ratio, ratio > 1.1};
}

}  // namespace nlgs
