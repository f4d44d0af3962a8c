#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smbp/funcdata.hpp"

namespace smbp {

struct ValidationScores {
  double purity = 0.0;
  double ch = 0.0;  // +infinity when the within-cluster scatter vanishes
  std::size_t k_used = 0;
  std::optional<double> misclassification;
};

/// Size-weighted majority-class fraction over clusters.
double purity(std::span<const int> cluster_labels, std::span<const int> class_labels);

/// Calinski-Harabasz index with unnormalized scatter matrices; 0 for one cluster.
double calinski_harabasz(const RowMatrix& points, std::span<const int> cluster_labels);

enum class MatchRule {
  one_to_one,  // optimal injective matching; unmatched clusters or classes count as errors
  majority,    // optimal bijection when the counts agree, majority class per cluster otherwise
};

/// Error rate after matching clusters to classes.
double misclassification(std::span<const int> cluster_labels, std::span<const int> class_labels,
                         MatchRule rule = MatchRule::one_to_one);

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method). Returns the column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace smbp
