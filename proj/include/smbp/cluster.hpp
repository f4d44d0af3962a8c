#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smbp/density.hpp"
#include "smbp/fpca.hpp"
#include "smbp/funcdata.hpp"
#include "smbp/modegrid.hpp"

namespace smbp {

struct ClusterConfig {
  std::size_t d = 3;
  double delta = 1.0;
  std::size_t r = 1;
  std::size_t cells_per_axis = 0;  // 0 selects default_cells_per_axis(d)
  KernelProfile kernel = KernelProfile::gaussian;
  double padding_bandwidths = 3.0;
  std::size_t cell_cap = kDefaultCellCap;
  BandwidthRule bandwidth_rule = BandwidthRule::normal_reference;

  void validate() const;
  std::size_t resolved_cells() const {
    return cells_per_axis ? cells_per_axis : default_cells_per_axis(d);
  }
};

struct ClusterResult {
  std::vector<int> labels;  // 1..g_hat
  std::size_t g_hat = 0;
  std::vector<bool> prototype;
  ModeSet modes;      // every retained mode, density order
  RegionSet regions;  // one region per retained mode
  std::vector<std::size_t> group_mode;  // group g (0-based) -> position in modes
  RowMatrix modal_curves;               // g_hat x m
  RowMatrix scores;                     // n x d scores used for clustering
  DensityEstimate density;
  std::vector<std::string> warnings;
};

/// Clustering on precomputed scores (the FPCA step already done). The
/// density estimate is computed here; see cluster_density to reuse one.
ClusterResult cluster_scores(const FpcaModel& model, const RowMatrix& scores,
                             const ClusterConfig& config);

/// Mode search, regions, prototypes and 1-NN propagation on a given density.
ClusterResult cluster_density(const FpcaModel& model, const RowMatrix& scores, DensityEstimate density,
                              std::size_t r);

/// Full pipeline: FPCA, density, modes, regions, prototypes, 1-NN.
ClusterResult cluster(const FunctionalSample& sample, const ClusterConfig& config);

/// Same pipeline, returning the fitted FPCA model alongside.
ClusterResult cluster(const FunctionalSample& sample, const ClusterConfig& config, FpcaModel& model_out);

/// Density on the padded grid for the given scores and configuration.
DensityEstimate cluster_density_estimate(const RowMatrix& scores, const ClusterConfig& config);

/// Label of a new curve: nearest prototype in d-score space.
int assign_new(const ClusterResult& result, const FpcaModel& model, std::span<const double> curve);

}  // namespace smbp
