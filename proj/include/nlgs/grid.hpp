#pragma once

// Uniform periodic grid on the box [-A, A]^d, real fields sampled on it, the
// L2 pairing, norms and the FFT-backed periodic convolution.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlgs/detail/fft.hpp"
#include "nlgs/errors.hpp"

namespace nlgs {

using Point = std::array<double, 3>;

class SpatialGrid {
 public:
  SpatialGrid(int dim, double half_width, std::size_t points_per_axis)
      : dim_(dim), half_width_(half_width), n_(points_per_axis) {
    if (dim < 1 || dim > 3) throw InvalidArgument("grid dim must be 1, 2 or 3");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw InvalidArgument("grid half_width must be positive and finite");
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
      throw InvalidArgument("points_per_axis must be an even integer >= 8");
    size_ = 1;
    for (int k = 0; k < dim; ++k) size_ *= n_;
  }

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  std::size_t points_per_axis() const { return n_; }
  std::size_t size() const { return size_; }
  double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  /// Δx^d, the quadrature weight of one grid point.
  double cell_volume() const { return std::pow(spacing(), dim_); }
  double box_volume() const { return std::pow(2.0 * half_width_, dim_); }
  /// Flat index of the grid point at the origin.
  std::size_t origin_index() const {
    std::array<std::size_t, 3> idx{n_ / 2, n_ / 2, n_ / 2};
    return flat(idx);
  }

  /// x_i = (i - n/2) Δx, so mirrored indices give exactly negated coordinates.
  double coordinate(std::size_t i) const {
    return static_cast<double>(static_cast<long>(i) - static_cast<long>(n_ / 2)) * spacing();
  }

  /// Row-major multi-index; axis 0 varies slowest. Unused axes are 0.
  std::array<std::size_t, 3> multi_index(std::size_t flat_index) const {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (int k = dim_ - 1; k >= 0; --k) {
      idx[k] = flat_index % n_;
      flat_index /= n_;
    }
    return idx;
  }
  std::size_t flat(const std::array<std::size_t, 3>& idx) const {
    std::size_t f = 0;
    for (int k = 0; k < dim_; ++k) f = f * n_ + idx[k];
    return f;
  }

  Point point(std::size_t flat_index) const {
    const auto idx = multi_index(flat_index);
    Point x{0.0, 0.0, 0.0};
    for (int k = 0; k < dim_; ++k) x[k] = coordinate(idx[k]);
    return x;
  }
  double radius(std::size_t flat_index) const {
    const auto x = point(flat_index);
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }
  double sup_coordinate(std::size_t flat_index) const {
    const auto x = point(flat_index);
    return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
  }

  /// Signed DFT index of axis position i: 0..n/2-1, then -n/2..-1.
  long signed_frequency_index(std::size_t i) const {
    return i < n_ / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_);
  }
  /// p_k = π k / A for the axis position i in FFT order.
  double frequency(std::size_t i) const {
    return std::numbers::pi * static_cast<double>(signed_frequency_index(i)) / half_width_;
  }
  Point frequency_point(std::size_t flat_index) const {
    const auto idx = multi_index(flat_index);
    Point p{0.0, 0.0, 0.0};
    for (int k = 0; k < dim_; ++k) p[k] = frequency(idx[k]);
    return p;
  }
  double frequency_norm_squared(std::size_t flat_index) const {
    const auto p = frequency_point(flat_index);
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
  }

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.half_width_ == b.half_width_;
  }

 private:
  int dim_;
  double half_width_;
  std::size_t n_;
  std::size_t size_;
};

/// Real function sampled on a SpatialGrid. Values are fixed at construction.
///
/// Spectral quantities (kernel symbols) reuse this type; they are then
/// indexed by frequency in FFT order, see SpatialGrid::frequency_point.
class Field {
 public:
  Field(SpatialGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field length does not match grid size");
    for (double v : values_)
      if (!std::isfinite(v)) throw NumericalError("field holds a non-finite value");
  }

  static Field constant(const SpatialGrid& grid, double c) { return Field(grid, std::vector<double>(grid.size(), c)); }
  static Field zeros(const SpatialGrid& grid) { return constant(grid, 0.0); }

  template <class F>
  static Field from_function(const SpatialGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
    return Field(grid, std::move(v));
  }

  const SpatialGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  template <class F>
  Field map(F&& f) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), f);
    return Field(grid_, std::move(v));
  }

 private:
  SpatialGrid grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const Field& f, const Field& g, const char* where) {
  if (!(f.grid() == g.grid())) throw GridMismatch(where);
}

template <class Op>
Field zip(const Field& f, const Field& g, Op&& op) {
  require_same_grid(f, g, "zip");
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(f[i], g[i]);
  return Field(f.grid(), std::move(v));
}

inline Field operator+(const Field& f, const Field& g) { return zip(f, g, std::plus<>{}); }
inline Field operator-(const Field& f, const Field& g) { return zip(f, g, std::minus<>{}); }
inline Field operator*(double s, const Field& f) {
  return f.map([s](double v) { return s * v; });
}
inline Field hadamard(const Field& f, const Field& g) { return zip(f, g, std::multiplies<>{}); }

/// Midpoint-rule L2 pairing Δx^d Σ f_i g_i.
inline double inner_product(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner_product");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return f.grid().cell_volume() * s;
}

struct Norms {
  double sup = 0.0;
  double l2 = 0.0;
  double l1 = 0.0;
};

inline Norms norms(const Field& f) {
  Norms n;
  double sq = 0.0, abs_sum = 0.0;
  for (double v : f.values()) {
    n.sup = std::max(n.sup, std::abs(v));
    sq += v * v;
    abs_sum += std::abs(v);
  }
  n.l2 = std::sqrt(f.grid().cell_volume() * sq);
  n.l1 = f.grid().cell_volume() * abs_sum;
  return n;
}

inline double l2_norm(const Field& f) { return norms(f).l2; }
inline double sup_norm(const Field& f) { return norms(f).sup; }
/// Δx^d Σ f_i, the discrete integral.
inline double integral(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().cell_volume() * s;
}

/// Largest |f| over the grid points with ||x||_inf >= A - width.
inline double boundary_shell_max(const Field& f, double width) {
  const auto& g = f.grid();
  const double cut = g.half_width() - width;
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (g.sup_coordinate(i) >= cut) m = std::max(m, std::abs(f[i]));
  return m;
}

namespace detail {

inline std::vector<Complex> forward_transform(const SpatialGrid& grid, std::span<const double> values) {
  std::vector<Complex> in(values.begin(), values.end()), out(values.size());
  plan_for(grid.dim(), grid.points_per_axis()).forward(in, out);
  return out;
}

// Normalized inverse (divides by the number of points).
inline std::vector<Complex> inverse_transform(const SpatialGrid& grid, std::span<const Complex> spectrum) {
  std::vector<Complex> out(spectrum.size());
  plan_for(grid.dim(), grid.points_per_axis()).backward(spectrum, out);
  const double scale = 1.0 / static_cast<double>(spectrum.size());
  for (auto& c : out) c *= scale;
  return out;
}

// (-1)^(k0+k1+k2): moving a field centred at the origin index to index 0
// (roll by n/2 per axis) multiplies its DFT by this sign.
inline double centring_sign(const SpatialGrid& grid, std::size_t flat_index) {
  const auto idx = grid.multi_index(flat_index);
  std::size_t s = 0;
  for (int k = 0; k < grid.dim(); ++k) s += idx[k];
  return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace detail

/// Discrete symbol of a field viewed as a kernel centred at the origin:
/// Δx^d Σ_j f(x_j) e^{-i p_k · x_j}. Unit discrete mass gives 1 at p = 0.
inline std::vector<detail::Complex> kernel_spectrum(const Field& kernel) {
  const auto& g = kernel.grid();
  auto spec = detail::forward_transform(g, kernel.values());
  const double w = g.cell_volume();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= w * detail::centring_sign(g, i);
  return spec;
}

/// Inverse of kernel_spectrum; returns the complex samples centred on the origin.
inline std::vector<detail::Complex> kernel_from_spectrum(const SpatialGrid& g, std::vector<detail::Complex> spec) {
  const double w = 1.0 / g.cell_volume();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= w * detail::centring_sign(g, i);
  return detail::inverse_transform(g, spec);
}

/// Periodic convolution against a fixed kernel whose spectrum is computed once.
class ConvolutionKernel {
 public:
  explicit ConvolutionKernel(const Field& kernel)
      : grid_(kernel.grid()), spectrum_(kernel_spectrum(kernel)), kernel_l2_(l2_norm(kernel)) {}

  const SpatialGrid& grid() const { return grid_; }
  std::span<const detail::Complex> spectrum() const { return spectrum_; }

  Field apply(const Field& f) const {
    if (!(f.grid() == grid_)) throw GridMismatch("convolve");
    auto spec = detail::forward_transform(grid_, f.values());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= spectrum_[i];
    const auto out = detail::inverse_transform(grid_, spec);
    std::vector<double> re(out.size());
    double imag = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      re[i] = out[i].real();
      imag = std::max(imag, std::abs(out[i].imag()));
    }
    const double bound = 1e-10 * kernel_l2_ * l2_norm(f);
    if (imag > bound && imag > 1e-300)
      throw NumericalError("convolution imaginary residue " + std::to_string(imag) + " exceeds tolerance");
    return Field(grid_, std::move(re));
  }

 private:
  SpatialGrid grid_;
  std::vector<detail::Complex> spectrum_;
  double kernel_l2_;
};

/// (f * g)(x_i) = Δx^d Σ_j f(x_i - x_j) g(x_j) on the periodic box.
inline Field convolve(const Field& f, const Field& g) {
  require_same_grid(f, g, "convolve");
  return ConvolutionKernel(f).apply(g);
}

// ---------------------------------------------------------------------------
// Field dump: "# dim=<d> n=<n> A=<A>" then "i0[,i1[,i2]],x0[,x1[,x2]],value".

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_field_csv(std::ostream& os, const Field& f, std::span<const std::string> extra_header = {}) {
  const auto& g = f.grid();
  os << "# dim=" << g.dim() << " n=" << g.points_per_axis() << " A=" << format_double(g.half_width()) << '\n';
  for (const auto& line : extra_header) os << "# " << line << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.multi_index(i);
    const auto x = g.point(i);
    for (int k = 0; k < g.dim(); ++k) os << idx[k] << ',';
    for (int k = 0; k < g.dim(); ++k) os << format_double(x[k]) << ',';
    os << format_double(f[i]) << '\n';
  }
}

inline Field read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("field dump: empty input");
  int dim = 0;
  std::size_t n = 0;
  double a = 0.0;
  {
    std::istringstream hs(line);
    std::string hash, tok;
    hs >> hash;
    if (hash != "#") throw InvalidArgument("field dump: missing header");
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "dim") dim = std::stoi(val);
      else if (key == "n") n = std::stoul(val);
      else if (key == "A") a = std::stod(val);
    }
  }
  SpatialGrid grid(dim, a, n);
  std::vector<double> values(grid.size(), 0.0);
  std::vector<bool> seen(grid.size(), false);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    if (cols.size() != static_cast<std::size_t>(2 * dim + 1)) throw InvalidArgument("field dump: bad row: " + line);
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (int k = 0; k < dim; ++k) {
      idx[k] = std::stoul(cols[k]);
      if (idx[k] >= n) throw InvalidArgument("field dump: index out of range");
    }
    const auto fi = grid.flat(idx);
    values[fi] = std::stod(cols.back());
    seen[fi] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InvalidArgument("field dump: missing rows");
  return Field(grid, std::move(values));
}

}  // namespace nlgs
