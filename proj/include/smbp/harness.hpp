#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smbp/cluster.hpp"
#include "smbp/discriminant.hpp"
#include "smbp/simulate.hpp"
#include "smbp/validation.hpp"

namespace smbp {

struct ClusterSetting {
  std::size_t d = 3;
  double delta = 1.0;
  std::size_t r = 1;
};

/// One (replicate, setting) outcome. `error` is empty on success.
struct ReplicateRecord {
  std::size_t replicate = 0;
  std::string setting;  // e.g. "d=3,delta=1.4,r=10" or "kmeans,k=2"
  std::uint64_t seed = 0;
  std::size_t g_hat = 0;
  double misclassification = 0.0;
  double purity = 0.0;
  double ch = 0.0;
  double wall_seconds = 0.0;
  std::string error;
};

struct SettingSummary {
  std::string setting;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double mean_misclassification = 0.0;
  double sd_misclassification = 0.0;
  double mean_purity = 0.0;
  double q50_g_hat = 0.0;
  double q75_g_hat = 0.0;
  double q90_g_hat = 0.0;
  double share_g_hat_2 = 0.0;  // fraction of completed replicates with g_hat == 2
};

struct ExperimentReport {
  std::vector<ReplicateRecord> records;  // sorted by (replicate, setting order)
  std::vector<SettingSummary> summaries;
  std::size_t failures = 0;
};

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double prob);

/// Aggregates per setting, computed from the records alone, in the order
/// settings first appear.
std::vector<SettingSummary> summarize(std::span<const ReplicateRecord> records);

struct ClusteringExperiment {
  HorseshoeConfig data;
  std::vector<ClusterSetting> settings;
  std::size_t replicates = 50;
  std::uint64_t base_seed = 1;
  std::size_t cells_per_axis = 0;
  KernelProfile kernel = KernelProfile::gaussian;
  double padding_bandwidths = 3.0;
  BandwidthRule bandwidth_rule = BandwidthRule::normal_reference;
  MatchRule match = MatchRule::one_to_one;
  /// k-means baseline with this many clusters on d = settings.front().d scores; 0 disables.
  std::size_t kmeans_k = 0;
  std::size_t kmeans_restarts = 10;
  /// Run replicates concurrently (the outcome is identical either way).
  bool parallel = true;
};

ExperimentReport run_clustering_experiment(const ClusteringExperiment& experiment);

struct DiscriminantExperiment {
  HorseshoeConfig data;
  std::vector<std::size_t> d_list{2, 3, 4, 5};
  std::size_t repeats = 20;
  double train_fraction = 2.0 / 3.0;
  std::uint64_t base_seed = 1;
  CovarianceMode mode = CovarianceMode::heteroscedastic;
  KernelProfile kernel = KernelProfile::gaussian;
};

struct DiscriminantResult {
  std::size_t d = 0;
  CrossValidationSummary cv;
  std::string error;
};

struct DiscriminantReport {
  std::vector<DiscriminantResult> per_d;
  std::vector<double> priors;  // group shares of the generated sample
  std::uint64_t data_seed = 0;
  std::size_t failures = 0;
};

/// One generated sample, cross-validated at every d of d_list.
DiscriminantReport run_discriminant_experiment(const DiscriminantExperiment& experiment);

struct KMeansResult {
  std::vector<int> labels;  // 1..k
  double wcss = 0.0;
};

/// Lloyd iterations from k-means++ seeds, best of `restarts` by WCSS.
KMeansResult kmeans_baseline(const RowMatrix& points, std::size_t k, std::uint64_t seed,
                             std::size_t restarts = 10);

struct GridSearchRow {
  double delta = 0.0;
  std::size_t r = 0;
  ValidationScores scores;
  std::string error;
};

struct GridSearchResult {
  std::vector<GridSearchRow> rows;  // delta-major, in the given grid order
  std::optional<std::size_t> best;  // CH maximiser; ties to larger delta, then larger r
};

GridSearchResult grid_search(const FunctionalSample& sample, const ClusterConfig& base,
                             std::span<const double> delta_grid, std::span<const std::size_t> r_grid,
                             std::optional<std::span<const int>> class_labels = std::nullopt);

}  // namespace smbp
