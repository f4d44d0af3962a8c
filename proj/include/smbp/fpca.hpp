#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smbp/funcdata.hpp"

namespace smbp {

/// Empirical Karhunen-Loeve decomposition of a functional sample.
///
/// Eigenfunctions are orthonormal under the trapezoidal inner product of
/// `grid`. The covariance uses divisor n, so column j of `scores` has
/// empirical variance eigenvalues[j]. `fev[j]` is the share of the total
/// sample variance carried by the first j+1 components.
struct FpcaModel {
  AbscissaGrid grid;
  std::vector<double> mean;
  std::vector<double> eigenvalues;  // non-increasing, clamped at 0
  RowMatrix eigenfunctions;         // J x m
  RowMatrix scores;                 // n x J
  double total_variance = 0.0;      // trace of the covariance operator
  std::vector<double> fev;

  std::size_t components() const noexcept { return eigenvalues.size(); }

  /// Components whose eigenvalue exceeds 1e-12 of the leading one.
  std::size_t positive_components() const noexcept;

  /// First d score columns as an n x d matrix.
  RowMatrix leading_scores(std::size_t d) const;
};

/// Default component count: min(n - 1, m).
std::size_t max_components_for(const FunctionalSample& sample);

FpcaModel fit_fpca(const FunctionalSample& sample, std::size_t max_components);

double fev(const FpcaModel& model, std::size_t d);

std::vector<double> project(const FpcaModel& model, std::span<const double> curve, std::size_t d);

/// mean + sum_j mode[j] * eigenfunction_j, on the model grid.
std::vector<double> modal_curve(const FpcaModel& model, std::span<const double> mode);

}  // namespace smbp
