#include "smbp/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "smbp/error.hpp"

namespace smbp {

std::size_t FpcaModel::positive_components() const noexcept {
  if (eigenvalues.empty() || !(eigenvalues.front() > 0.0)) return 0;
  const double floor = 1e-12 * eigenvalues.front();
  std::size_t count = 0;
  while (count < eigenvalues.size() && eigenvalues[count] > floor) ++count;
  return count;
}

RowMatrix FpcaModel::leading_scores(std::size_t d) const {
  if (d == 0 || d > components()) {
    throw Error(ErrorCode::index_out_of_range,
                "requested " + std::to_string(d) + " score columns, model has " +
                    std::to_string(components()));
  }
  return scores.leftCols(static_cast<Eigen::Index>(d));
}

std::size_t max_components_for(const FunctionalSample& sample) {
  return std::min(sample.n() > 0 ? sample.n() - 1 : 0, sample.m());
}

FpcaModel fit_fpca(const FunctionalSample& sample, std::size_t max_components) {
  const std::size_t n = sample.n();
  const std::size_t m = sample.m();
  if (n < 2) {
    throw Error(ErrorCode::sample_too_small, "FPCA needs at least 2 curves, got " + std::to_string(n));
  }
  if (max_components == 0 || max_components > std::min(n - 1, m)) {
    throw Error(ErrorCode::index_out_of_range,
                "max_components must lie in [1, " + std::to_string(std::min(n - 1, m)) + "], got " +
                    std::to_string(max_components));
  }

  auto [mean, centered] = center(sample);
  const RowMatrix& xc = centered.values();
  const auto& w = sample.grid().weights();

  // Symmetric form of the weighted covariance operator: W^1/2 C W^1/2.
  Eigen::VectorXd sqrt_w(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) sqrt_w[static_cast<Eigen::Index>(k)] = std::sqrt(w[k]);
  const RowMatrix scaled = xc * sqrt_w.asDiagonal();
  Eigen::MatrixXd cov = (scaled.transpose() * scaled) / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose()).eval();

  const double trace = cov.trace();
  double data_scale = 0.0;
  for (Eigen::Index i = 0; i < sample.values().rows(); ++i) {
    data_scale = std::max(data_scale, sample.values().row(i).cwiseAbs().maxCoeff());
  }
  if (!(trace > 1e-28 * (1.0 + data_scale * data_scale))) {
    throw Error(ErrorCode::degenerate_covariance, "sample covariance is zero (all curves identical)");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::degenerate_covariance, "covariance eigensolver failed to converge");
  }

  const std::size_t J = max_components;
  FpcaModel model{sample.grid(), std::move(mean), {}, RowMatrix(J, m), RowMatrix(n, J), trace, {}};
  model.eigenvalues.resize(J);

  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  for (std::size_t j = 0; j < J; ++j) {
    const Eigen::Index src = static_cast<Eigen::Index>(m - 1 - j);
    model.eigenvalues[j] = std::max(0.0, evals[src]);

    Eigen::VectorXd xi(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      xi[kk] = evecs(kk, src) / sqrt_w[kk];
    }
    // sign: entry of largest magnitude is positive
    Eigen::Index arg = 0;
    xi.cwiseAbs().maxCoeff(&arg);
    if (xi[arg] < 0.0) xi = -xi;
    model.eigenfunctions.row(static_cast<Eigen::Index>(j)) = xi.transpose();
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = centered.curve(i);
    for (std::size_t j = 0; j < J; ++j) {
      model.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          inner_product(row, row_span(model.eigenfunctions, static_cast<Eigen::Index>(j)), model.grid);
    }
  }

  model.fev.resize(J);
  double cumulative = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    cumulative += model.eigenvalues[j];
    model.fev[j] = std::min(1.0, cumulative / trace);
  }
  if (J == std::min(n - 1, m) && !model.fev.empty()) {
    // every non-null eigenvalue retained: the remainder is round-off
    model.fev.back() = 1.0;
  }
  return model;
}

double fev(const FpcaModel& model, std::size_t d) {
  if (d == 0 || d > model.components()) {
    throw Error(ErrorCode::index_out_of_range,
                "FEV dimension " + std::to_string(d) + " outside [1, " +
                    std::to_string(model.components()) + "]");
  }
  return model.fev[d - 1];
}

std::vector<double> project(const FpcaModel& model, std::span<const double> curve, std::size_t d) {
  const std::size_t m = model.grid.size();
  if (curve.size() != m) {
    throw Error(ErrorCode::dimension_mismatch,
                "curve has " + std::to_string(curve.size()) + " values, model grid has " +
                    std::to_string(m));
  }
  if (d == 0 || d > model.components()) {
    throw Error(ErrorCode::dimension_mismatch,
                "projection dimension " + std::to_string(d) + " outside [1, " +
                    std::to_string(model.components()) + "]");
  }
  std::vector<double> centered(m);
  for (std::size_t k = 0; k < m; ++k) centered[k] = curve[k] - model.mean[k];
  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = inner_product(centered, row_span(model.eigenfunctions, static_cast<Eigen::Index>(j)),
                           model.grid);
  }
  return out;
}

std::vector<double> modal_curve(const FpcaModel& model, std::span<const double> mode) {
  const std::size_t d = mode.size();
  if (d == 0 || d > model.components()) {
    throw Error(ErrorCode::dimension_mismatch,
                "mode dimension " + std::to_string(d) + " outside [1, " +
                    std::to_string(model.components()) + "]");
  }
  std::vector<double> out = model.mean;
  for (std::size_t j = 0; j < d; ++j) {
    const auto xi = row_span(model.eigenfunctions, static_cast<Eigen::Index>(j));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += mode[j] * xi[k];
  }
  return out;
}

}  // namespace smbp
