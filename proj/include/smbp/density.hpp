#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "smbp/funcdata.hpp"
#include "smbp/grid.hpp"

namespace smbp {

enum class KernelProfile { gaussian, epanechnikov };

std::string_view to_string(KernelProfile p);
KernelProfile parse_kernel(std::string_view name);

/// Radial kernel normalized to integrate to 1 over R^dim.
struct KernelSpec {
  KernelProfile profile = KernelProfile::gaussian;
  std::size_t dim = 1;

  /// Normalizing constant of the radial profile in `dim` dimensions.
  double normalizer() const;
};

/// Diagonal bandwidth. The effective width on axis j is delta * h[j].
struct Bandwidth {
  std::vector<double> h;
  double delta = 1.0;

  double width(std::size_t j) const { return delta * h[j]; }
  Bandwidth scaled(double factor) const { return {h, delta * factor}; }
};

enum class BandwidthRule {
  normal_reference,  // h_j = s_j * (4 / ((d + 2) n))^(1 / (d + 4))
  univariate,        // h_j = 0.9 * min(s_j, IQR_j / 1.34) * n^(-1/5), per axis
};

std::string_view to_string(BandwidthRule rule);
BandwidthRule parse_bandwidth_rule(std::string_view name);

/// Diagonal Silverman bandwidth with delta = 1. s_j uses divisor n - 1.
Bandwidth silverman_bandwidth(const RowMatrix& scores,
                              BandwidthRule rule = BandwidthRule::normal_reference);

double kde_at(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel,
              std::span<const double> x);

struct DensityEstimate {
  RegularGrid grid;
  std::vector<double> values;  // one per cell, linear grid order
  Bandwidth bandwidth;
  KernelSpec kernel;
};

/// Density at every cell centre. Parallel over cells; each cell holds the
/// exact value kde_at would return at that centre.
DensityEstimate kde_on_grid(const RowMatrix& scores, const Bandwidth& bw, const KernelSpec& kernel,
                            const RegularGrid& grid);

}  // namespace smbp
