#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace smbp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const RowMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Ordered abscissa points with their trapezoidal quadrature weights.
class AbscissaGrid {
 public:
  explicit AbscissaGrid(std::vector<double> points);

  /// m equispaced points covering [lower, upper], endpoints included.
  static AbscissaGrid equispaced(std::size_t m, double lower = 0.0, double upper = 1.0);

  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool is_equispaced(double rel_tol = 1e-9) const;

  bool operator==(const AbscissaGrid& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// n curves sampled on one shared grid; row i is curve i.
class FunctionalSample {
 public:
  FunctionalSample(AbscissaGrid grid, RowMatrix values);

  const AbscissaGrid& grid() const noexcept { return grid_; }
  const RowMatrix& values() const noexcept { return values_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t m() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::span<const double> curve(std::size_t i) const {
    return row_span(values_, static_cast<Eigen::Index>(i));
  }

  /// Rows selected by index, in the given order.
  FunctionalSample subset(std::span<const std::size_t> rows) const;

 private:
  AbscissaGrid grid_;
  RowMatrix values_;
};

/// Trapezoidal L2 inner product, accumulated left to right over the grid.
double inner_product(std::span<const double> a, std::span<const double> b,
                     const AbscissaGrid& grid);

/// Finite-difference second derivative on an equispaced grid (m >= 5).
FunctionalSample second_derivative(const FunctionalSample& sample);

struct CenteredSample {
  std::vector<double> mean;
  FunctionalSample centered;
};

CenteredSample center(const FunctionalSample& sample);

}  // namespace smbp
