#include "smbp/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smbp/decay.hpp"
#include "smbp/error.hpp"

namespace smbp {

namespace {

// Both evaluation paths go through these helpers so grid cells and
// pointwise calls agree bit for bit.
inline double gauss_factor(double score, double at, double width) {
  const double z = (score - at) / width;
  return std::exp(-0.5 * z * z);
}

inline double width_product(const Bandwidth& bw, std::size_t d) {
  double p = 1.0;
  for (std::size_t j = 0; j < d; ++j) p *= bw.width(j);
  return p;
}

void check_bandwidth(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel) {
  const auto d = static_cast<std::size_t>(scores.cols());
  if (bw.h.size() != d || kernel.dim != d) {
    throw Error(ErrorCode::dimension_mismatch,
                "scores have " + std::to_string(d) + " columns, bandwidth has " +
                    std::to_string(bw.h.size()) + " and kernel dimension is " +
                    std::to_string(kernel.dim));
  }
  if (scores.rows() < 1) {
    throw Error(ErrorCode::sample_too_small, "density estimate needs at least one score row");
  }
  if (!(bw.delta > 0.0)) {
    throw Error(ErrorCode::invalid_input, "bandwidth scale delta must be positive");
  }
  for (double h : bw.h) {
    if (!(h > 0.0)) throw Error(ErrorCode::invalid_input, "bandwidths must be positive");
  }
}

}  // namespace

std::string_view to_string(KernelProfile p) {
  return p == KernelProfile::gaussian ? "gaussian" : "epanechnikov";
}

KernelProfile parse_kernel(std::string_view name) {
  if (name == "gaussian") return KernelProfile::gaussian;
  if (name == "epanechnikov") return KernelProfile::epanechnikov;
  throw Error(ErrorCode::invalid_input, "unknown kernel '" + std::string(name) + "'");
}

double KernelSpec::normalizer() const {
  const double d = static_cast<double>(dim);
  if (profile == KernelProfile::gaussian) {
    return std::pow(2.0 * std::numbers::pi, -0.5 * d);
  }
  // (d + 2) / (2 V_d) * (1 - |u|^2) on the unit ball
  return (d + 2.0) / (2.0 * ball_volume(dim, 1.0));
}

std::string_view to_string(BandwidthRule rule) {
  return rule == BandwidthRule::normal_reference ? "normal-reference" : "univariate";
}

BandwidthRule parse_bandwidth_rule(std::string_view name) {
  if (name == "normal-reference") return BandwidthRule::normal_reference;
  if (name == "univariate") return BandwidthRule::univariate;
  throw Error(ErrorCode::invalid_input, "unknown bandwidth rule '" + std::string(name) + "'");
}

namespace {

// R type 7 on a sorted vector.
double sorted_quantile(const std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Bandwidth silverman_bandwidth(const RowMatrix& scores, BandwidthRule rule) {
  const auto n = static_cast<std::size_t>(scores.rows());
  const auto d = static_cast<std::size_t>(scores.cols());
  if (n < 2) {
    throw Error(ErrorCode::sample_too_small, "Silverman bandwidth needs at least 2 score rows");
  }
  if (d == 0) throw Error(ErrorCode::invalid_input, "scores have no columns");
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double factor = rule == BandwidthRule::normal_reference
                            ? std::pow(4.0 / ((dd + 2.0) * nd), 1.0 / (dd + 4.0))
                            : 0.9 * std::pow(nd, -0.2);
  Bandwidth bw{std::vector<double>(d), 1.0};
  std::vector<double> sorted(n);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = scores.col(static_cast<Eigen::Index>(j));
    double mean = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) mean += col[i];
    mean /= nd;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) ss += (col[i] - mean) * (col[i] - mean);
    double spread = std::sqrt(ss / (nd - 1.0));
    if (rule == BandwidthRule::univariate) {
      for (std::size_t i = 0; i < n; ++i) sorted[i] = col[static_cast<Eigen::Index>(i)];
      std::sort(sorted.begin(), sorted.end());
      const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
      // a zero IQR falls back to the standard deviation
      if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    }
    if (!(spread > 0.0)) {
      throw Error(ErrorCode::degenerate_scores,
                  "score column " + std::to_string(j + 1) + " has zero variance");
    }
    bw.h[j] = spread * factor;
  }
  return bw;
}

double kde_at(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel,
              std::span<const double> x) {
  check_bandwidth(scores, bw, kernel);
  const auto d = static_cast<std::size_t>(scores.cols());
  if (x.size() != d) {
    throw Error(ErrorCode::dimension_mismatch,
                "query has " + std::to_string(x.size()) + " coordinates, scores have " +
                    std::to_string(d));
  }
  const Eigen::Index n = scores.rows();
  double sum = 0.0;
  if (kernel.profile == KernelProfile::gaussian) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* row = scores.data() + i * scores.cols();
      double p = gauss_factor(row[0], x[0], bw.width(0));
      for (std::size_t j = 1; j < d; ++j) p *= gauss_factor(row[j], x[j], bw.width(j));
      sum += p;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* row = scores.data() + i * scores.cols();
      double r2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double z = (row[j] - x[j]) / bw.width(j);
        r2 += z * z;
      }
      if (r2 < 1.0) sum += 1.0 - r2;
    }
  }
  return (sum * (kernel.normalizer() / width_product(bw, d))) / static_cast<double>(n);
}

DensityEstimate kde_on_grid(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel,
                            const RegularGrid& grid) {
  check_bandwidth(scores, bw, kernel);
  const auto d = static_cast<std::size_t>(scores.cols());
  if (grid.dim() != d) {
    throw Error(ErrorCode::dimension_mismatch,
                "grid has " + std::to_string(grid.dim()) + " axes, scores have " +
                    std::to_string(d) + " columns");
  }
  DensityEstimate est{grid, std::vector<double>(grid.size(), 0.0), bw, kernel};
  const auto cells = static_cast<std::ptrdiff_t>(grid.size());

  if (kernel.profile != KernelProfile::gaussian) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
      const auto x = grid.center_of(static_cast<std::size_t>(c));
      est.values[static_cast<std::size_t>(c)] = kde_at(scores, bw, kernel, x);
    }
    return est;
  }

  // Separable gaussian. Leading axes use tables laid out [cell][point], the
  // last axis [point][cell], so each row of cells along the last axis
  // accumulates point by point in the same order and association as kde_at.
  const auto n = static_cast<std::size_t>(scores.rows());
  const std::size_t last = d - 1;
  const std::size_t run = grid.axis(last).count;
  std::vector<std::vector<double>> table(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t count = grid.axis(j).count;
    table[j].resize(count * n);
    for (std::size_t c = 0; c < count; ++c) {
      const double at = grid.center(j, c);
      for (std::size_t i = 0; i < n; ++i) {
        const double f = gauss_factor(scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), at,
                                      bw.width(j));
        if (j == last) {
          table[j][i * count + c] = f;
        } else {
          table[j][c * n + i] = f;
        }
      }
    }
  }
  const double scale = kernel.normalizer() / width_product(bw, d);
  const auto rows = static_cast<std::ptrdiff_t>(grid.size() / run);

#pragma omp parallel
  {
    std::vector<std::size_t> index(d);
    std::vector<double> lead(n);
    std::vector<double> acc(run);
#pragma omp for schedule(static)
    for (std::ptrdiff_t row = 0; row < rows; ++row) {
      const std::size_t first = static_cast<std::size_t>(row) * run;
      grid.unravel(first, index);
      for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        if (last > 0) {
          p = table[0][index[0] * n + i];
          for (std::size_t j = 1; j < last; ++j) p *= table[j][index[j] * n + i];
        }
        lead[i] = p;
      }
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double g = lead[i];
        if (g == 0.0) continue;  // adds exact zeros
        const double* f = table[last].data() + i * run;
        for (std::size_t c = 0; c < run; ++c) acc[c] += g * f[c];
      }
      for (std::size_t c = 0; c < run; ++c) est.values[first + c] = (acc[c] * scale) / static_cast<double>(n);
    }
  }
  return est;
}

}  // namespace smbp
