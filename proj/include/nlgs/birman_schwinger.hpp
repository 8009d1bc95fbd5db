#pragma once

// λ-parametrized operators built from the resolvent split
//   (λ - L₀)^{-1} = (1 + A_λ) / (λ + 1),   A_λ = Σ_{n≥1} a^{*n} / (λ+1)^n,
// the compact positive operator Q_λ = W_λ^{-1} A_λ V / (λ+1) with
// W_λ = 1 - V/(λ+1), and its symmetrized form Ŝ_λ.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nlgs/dispersal.hpp"
#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"

namespace nlgs {

enum class OperatorMode { cb, l2_symmetric };

/// Kernel G_λ of A_λ, obtained by inverting the symbol ã/(λ+1-ã).
class ResolventKernel {
 public:
  /// `kernel_symbol` is ã on the frequency lattice (see nlgs::symbol).
  ResolventKernel(double lambda, const Field& kernel_symbol)
      : lambda_(lambda), symbol_(make_symbol(lambda, kernel_symbol)), spatial_(invert(symbol_)), conv_(spatial_) {}

  double lambda() const { return lambda_; }
  const SpatialGrid& grid() const { return spatial_.grid(); }
  /// G̃_λ(p) in FFT order.
  const Field& symbol() const { return symbol_; }
  /// G_λ(x) centred at the origin; nonnegative after ripple clamping.
  const Field& spatial() const { return spatial_; }
  double mass() const { return integral(spatial_); }
  const ConvolutionKernel& convolution() const { return conv_; }

 private:
  static Field make_symbol(double lambda, const Field& a_hat) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("resolvent parameter lambda must be > 0");
    return a_hat.map([lambda](double a) { return a / (lambda + 1.0 - a); });
  }

  static Field invert(const Field& g_hat) {
    const auto& grid = g_hat.grid();
    std::vector<detail::Complex> spec(g_hat.values().begin(), g_hat.values().end());
    const auto samples = kernel_from_spectrum(grid, std::move(spec));
    std::vector<double> g(samples.size());
    double gmax = 0.0, imag = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = samples[i].real();
      gmax = std::max(gmax, g[i]);
      imag = std::max(imag, std::abs(samples[i].imag()));
    }
    if (imag > 1e-10 * std::max(gmax, 1.0))
      throw NumericalError("resolvent kernel has imaginary residue " + format_double(imag));
    const double floor = -1e-12 * gmax;
    for (auto& v : g) {
      if (v < floor)
        throw NumericalError("resolvent kernel lost positivity (min " + format_double(v) + ", max " +
                             format_double(gmax) + "); box too small or symbol broken");
      if (v < 0.0) v = 0.0;
    }
    return Field(grid, std::move(g));
  }

  double lambda_;
  Field symbol_;
  Field spatial_;
  ConvolutionKernel conv_;
};

inline ResolventKernel build_resolvent(double lambda, const DispersalKernel& kernel, const SpatialGrid& grid,
                                       SymbolMode mode = SymbolMode::sampled) {
  if (!(lambda > 0.0)) throw InvalidArgument("resolvent parameter lambda must be > 0");
  return ResolventKernel(lambda, symbol(kernel, grid, mode));
}

inline Field apply_A(const ResolventKernel& resolvent, const Field& f) { return resolvent.convolution().apply(f); }

/// Q_λ (cb mode) and Ŝ_λ (l2_symmetric mode) for a fixed potential.
/// The potential may exceed 1 (subcritical use); only λ + 1 - V > 0 is required.
class BirmanSchwingerOp {
 public:
  BirmanSchwingerOp(ResolventKernel resolvent, Field potential, OperatorMode mode = OperatorMode::cb)
      : resolvent_(std::move(resolvent)), v_(std::move(potential)), mode_(mode), w_(Field::zeros(v_.grid())),
        m_half_(Field::zeros(v_.grid())) {
    if (!(v_.grid() == resolvent_.grid())) throw GridMismatch("BirmanSchwingerOp");
    const double lp1 = resolvent_.lambda() + 1.0;
    if (v_.min() < -1e-12) throw InvalidArgument("potential must be nonnegative");
    if (!(lp1 - v_.max() > 0.0))
      throw InvalidArgument("W_lambda is not invertible: lambda + 1 - max V = " + format_double(lp1 - v_.max()));
    w_ = v_.map([lp1](double v) { return 1.0 - v / lp1; });
    m_half_ = zip(v_, w_, [](double v, double w) { return std::sqrt(std::max(v, 0.0) / w); });
  }

  double lambda() const { return resolvent_.lambda(); }
  OperatorMode mode() const { return mode_; }
  const ResolventKernel& resolvent() const { return resolvent_; }
  const Field& potential() const { return v_; }
  /// W_λ = 1 - V/(λ+1).
  const Field& w() const { return w_; }
  /// V^{1/2} W_λ^{-1/2}, the diagonal factor of Ŝ_λ.
  const Field& symmetrizer() const { return m_half_; }
  bool potential_is_zero() const { return v_.max() <= 0.0; }

  /// (Q_λ f)(x) = (G_λ * (V f))(x) / (λ + 1 - V(x)).
  Field apply_Q(const Field& f) const {
    require_same_grid(f, v_, "apply_Q");
    const double lp1 = lambda() + 1.0;
    const auto g = apply_A(resolvent_, hadamard(v_, f));
    return zip(g, v_, [lp1](double y, double v) { return y / (lp1 - v); });
  }

  /// Ŝ_λ f = (1/(λ+1)) W^{-1/2} V^{1/2} A_λ V^{1/2} W^{-1/2} f.
  Field apply_S_hat(const Field& f) const {
    require_same_grid(f, v_, "apply_S_hat");
    const double s = 1.0 / (lambda() + 1.0);
    const auto g = apply_A(resolvent_, hadamard(m_half_, f));
    return zip(g, m_half_, [s](double y, double m) { return s * m * y; });
  }

  /// Operator selected by the mode: Q_λ for cb, Ŝ_λ for l2_symmetric.
  Field apply(const Field& f) const { return mode_ == OperatorMode::cb ? apply_Q(f) : apply_S_hat(f); }

  /// Maps an Ŝ_λ eigenvector u back to ψ = W^{-1} A_λ V^{1/2} W^{-1/2} u / (λ+1),
  /// the matching Q_λ eigenvector (up to the eigenvalue factor).
  Field psi_from_symmetric(const Field& u) const {
    const double lp1 = lambda() + 1.0;
    const auto g = apply_A(resolvent_, hadamard(m_half_, u));
    return zip(g, w_, [lp1](double y, double w) { return y / (w * lp1); });
  }

 private:
  ResolventKernel resolvent_;
  Field v_;
  OperatorMode mode_;
  Field w_;
  Field m_half_;
};

/// L f = -m f + a * f, with the kernel spectrum computed once.
class NonlocalOperator {
 public:
  NonlocalOperator(const Field& kernel_sample, Field mortality) : conv_(kernel_sample), m_(std::move(mortality)) {
    if (!(m_.grid() == conv_.grid())) throw GridMismatch("NonlocalOperator");
  }
  Field apply(const Field& f) const {
    require_same_grid(f, m_, "apply_L");
    const auto af = conv_.apply(f);
    return zip(af, hadamard(m_, f), std::minus<>{});
  }
  const Field& mortality() const { return m_; }

 private:
  ConvolutionKernel conv_;
  Field m_;
};

inline Field apply_L(const Field& mortality, const Field& kernel_sample, const Field& f) {
  return NonlocalOperator(kernel_sample, mortality).apply(f);
}

}  // namespace nlgs
