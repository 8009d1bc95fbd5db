#pragma once

// Dense materializations used as independent verification paths. Capped at
// 4096 grid points.

#include <Eigen/Dense>

#include <cstddef>

#include "nlgs/birman_schwinger.hpp"
#include "nlgs/errors.hpp"
#include "nlgs/grid.hpp"

namespace nlgs::dense {

inline constexpr std::size_t max_points = 4096;

inline void require_size_cap(const SpatialGrid& g) {
  if (g.size() > max_points)
    throw InvalidArgument("dense materialization limited to " + std::to_string(max_points) + " grid points");
}

/// Flat index of the displacement x_i - x_j (periodic), as stored in a centred kernel field.
inline std::size_t displacement_index(const SpatialGrid& g, std::size_t i, std::size_t j) {
  const auto a = g.multi_index(i), b = g.multi_index(j);
  const std::size_t n = g.points_per_axis();
  std::array<std::size_t, 3> d{0, 0, 0};
  for (int k = 0; k < g.dim(); ++k) d[k] = (a[k] + n + n / 2 - b[k]) % n;
  return g.flat(d);
}

/// C[i][j] = Δx^d k(x_i - x_j).
inline Eigen::MatrixXd convolution_matrix(const Field& kernel) {
  const auto& g = kernel.grid();
  require_size_cap(g);
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd c(n, n);
  const double w = g.cell_volume();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = w * kernel[displacement_index(g, i, j)];
  return c;
}

/// L[i][j] = Δx^d a(x_i - x_j) - m(x_i) δ_ij.
inline Eigen::MatrixXd L_matrix(const Field& kernel_sample, const Field& mortality) {
  require_same_grid(kernel_sample, mortality, "dense L");
  Eigen::MatrixXd l = convolution_matrix(kernel_sample);
  for (Eigen::Index i = 0; i < l.rows(); ++i) l(i, i) -= mortality[static_cast<std::size_t>(i)];
  return l;
}

/// Entries G_λ(x_i - x_j) V(x_j) Δx^d / (λ + 1 - V(x_i)).
inline Eigen::MatrixXd Q_matrix(const BirmanSchwingerOp& op) {
  Eigen::MatrixXd q = convolution_matrix(op.resolvent().spatial());
  const auto& v = op.potential();
  const double lp1 = op.lambda() + 1.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j)
      q(i, j) *= v[static_cast<std::size_t>(j)] / (lp1 - v[static_cast<std::size_t>(i)]);
  return q;
}

inline Eigen::MatrixXd S_hat_matrix(const BirmanSchwingerOp& op) {
  Eigen::MatrixXd s = convolution_matrix(op.resolvent().spatial());
  const auto& m = op.symmetrizer();
  const double scale = 1.0 / (op.lambda() + 1.0);
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      s(i, j) *= scale * m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)];
  return s;
}

inline Eigen::VectorXd to_vector(const Field& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

inline Field to_field(const SpatialGrid& g, const Eigen::VectorXd& v) {
  return Field(g, std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace nlgs::dense
