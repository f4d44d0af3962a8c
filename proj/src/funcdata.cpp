#include "smbp/funcdata.hpp"

#include <cmath>
#include <string>

#include "smbp/error.hpp"

namespace smbp {

AbscissaGrid::AbscissaGrid(std::vector<double> points) : points_(std::move(points)) {
  const std::size_t m = points_.size();
  if (m < 2) {
    throw Error(ErrorCode::insufficient_points, "abscissa grid needs at least 2 points");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(points_[k])) {
      throw Error(ErrorCode::invalid_input, "abscissa point " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(points_[k] > points_[k - 1])) {
      throw Error(ErrorCode::invalid_input,
                  "abscissa points must be strictly increasing (at index " + std::to_string(k) + ")");
    }
  }
  weights_.assign(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double half = 0.5 * (points_[k + 1] - points_[k]);
    weights_[k] += half;
    weights_[k + 1] += half;
  }
}

AbscissaGrid AbscissaGrid::equispaced(std::size_t m, double lower, double upper) {
  if (m < 2) {
    throw Error(ErrorCode::insufficient_points, "abscissa grid needs at least 2 points");
  }
  std::vector<double> pts(m);
  const double step = (upper - lower) / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    pts[k] = lower + static_cast<double>(k) * step;
  }
  pts.back() = upper;
  return AbscissaGrid(std::move(pts));
}

bool AbscissaGrid::is_equispaced(double rel_tol) const {
  const double span = points_.back() - points_.front();
  const double step = span / static_cast<double>(points_.size() - 1);
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    if (std::abs((points_[k + 1] - points_[k]) - step) > rel_tol * span) {
      return false;
    }
  }
  return true;
}

FunctionalSample::FunctionalSample(AbscissaGrid grid, RowMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() < 1) {
    throw Error(ErrorCode::sample_too_small, "functional sample needs at least one curve");
  }
  if (static_cast<std::size_t>(values_.cols()) != grid_.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "curves have " + std::to_string(values_.cols()) + " values but the grid has " +
                    std::to_string(grid_.size()) + " points");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::invalid_input, "functional sample contains non-finite values");
  }
}

FunctionalSample FunctionalSample::subset(std::span<const std::size_t> rows) const {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n()) {
      throw Error(ErrorCode::index_out_of_range, "row index out of range in subset");
    }
    out.row(static_cast<Eigen::Index>(i)) = values_.row(static_cast<Eigen::Index>(rows[i]));
  }
  return FunctionalSample(grid_, std::move(out));
}

double inner_product(std::span<const double> a, std::span<const double> b,
                     const AbscissaGrid& grid) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "inner product of curves with " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " values on a grid of " +
                    std::to_string(grid.size()) + " points");
  }
  const auto& w = grid.weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    // a*b first so the result is bit-identical under argument swap
    acc += w[k] * (a[k] * b[k]);
  }
  return acc;
}

FunctionalSample second_derivative(const FunctionalSample& sample) {
  const std::size_t m = sample.m();
  if (m < 5) {
    throw Error(ErrorCode::insufficient_points,
                "second derivative needs at least 5 grid points, got " + std::to_string(m));
  }
  if (!sample.grid().is_equispaced()) {
    throw Error(ErrorCode::unsupported_grid, "second derivative requires an equispaced grid");
  }
  const auto& t = sample.grid().points();
  const double h = (t.back() - t.front()) / static_cast<double>(m - 1);
  const double inv_h2 = 1.0 / (h * h);

  const RowMatrix& x = sample.values();
  RowMatrix out(x.rows(), x.cols());
  const auto last = static_cast<Eigen::Index>(m - 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 1; k < last; ++k) {
      out(i, k) = (x(i, k - 1) - 2.0 * x(i, k) + x(i, k + 1)) * inv_h2;
    }
    // second-order one-sided stencils
    out(i, 0) = (2.0 * x(i, 0) - 5.0 * x(i, 1) + 4.0 * x(i, 2) - x(i, 3)) * inv_h2;
    out(i, last) =
        (2.0 * x(i, last) - 5.0 * x(i, last - 1) + 4.0 * x(i, last - 2) - x(i, last - 3)) * inv_h2;
  }
  return FunctionalSample(sample.grid(), std::move(out));
}

CenteredSample center(const FunctionalSample& sample) {
  const RowMatrix& x = sample.values();
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  std::vector<double> mean(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index k = 0; k < m; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += x(i, k);
    mean[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
  }
  RowMatrix c(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) c(i, k) = x(i, k) - mean[static_cast<std::size_t>(k)];
  }
  return {std::move(mean), FunctionalSample(sample.grid(), std::move(c))};
}

}  // namespace smbp
