#include "smbp/validation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "smbp/error.hpp"

namespace smbp {

namespace {

std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& count) {
  std::map<int, std::size_t> ids;
  for (int l : labels) ids.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = next;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

struct Confusion {
  std::vector<std::vector<std::size_t>> counts;  // [cluster][class]
  std::size_t clusters = 0;
  std::size_t classes = 0;
};

Confusion confusion(std::span<const int> cluster_labels, std::span<const int> class_labels) {
  if (cluster_labels.size() != class_labels.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "cluster labels (" + std::to_string(cluster_labels.size()) + ") and class labels (" +
                    std::to_string(class_labels.size()) + ") differ in length");
  }
  if (cluster_labels.empty()) throw Error(ErrorCode::invalid_input, "no labels to compare");
  Confusion c;
  const auto a = compact(cluster_labels, c.clusters);
  const auto b = compact(class_labels, c.classes);
  c.counts.assign(c.clusters, std::vector<std::size_t>(c.classes, 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++c.counts[a[i]][b[i]];
  return c;
}

double majority_hits(const Confusion& c) {
  double hits = 0.0;
  for (const auto& row : c.counts) hits += static_cast<double>(*std::max_element(row.begin(), row.end()));
  return hits;
}

}  // namespace

double purity(std::span<const int> cluster_labels, std::span<const int> class_labels) {
  const Confusion c = confusion(cluster_labels, class_labels);
  return majority_hits(c) / static_cast<double>(cluster_labels.size());
}

double calinski_harabasz(const RowMatrix& points, std::span<const int> cluster_labels) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto d = static_cast<std::size_t>(points.cols());
  if (cluster_labels.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "one cluster label per point is required");
  }
  std::size_t K = 0;
  const auto ids = compact(cluster_labels, K);
  if (n <= K) {
    throw Error(ErrorCode::degenerate_partition,
                "CH index needs more points (" + std::to_string(n) + ") than clusters (" +
                    std::to_string(K) + ")");
  }
  if (K == 1) return 0.0;

  std::vector<double> grand(d, 0.0);
  std::vector<std::vector<double>> centroid(K, std::vector<double>(d, 0.0));
  std::vector<std::size_t> size(K, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++size[ids[i]];
    for (std::size_t j = 0; j < d; ++j) {
      const double x = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      grand[j] += x;
      centroid[ids[i]][j] += x;
    }
  }
  for (std::size_t j = 0; j < d; ++j) grand[j] /= static_cast<double>(n);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < d; ++j) centroid[k][j] /= static_cast<double>(size[k]);
  }

  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - centroid[ids[i]][j];
      within += diff * diff;
    }
  }
  double between = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = centroid[k][j] - grand[j];
      between += static_cast<double>(size[k]) * diff * diff;
    }
  }
  if (!(within > 0.0)) return std::numeric_limits<double>::infinity();
  return (between / static_cast<double>(K - 1)) / (within / static_cast<double>(n - K));
}

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) throw Error(ErrorCode::invalid_input, "assignment cost matrix must be square");
  }
  // Potentials formulation, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

double misclassification(std::span<const int> cluster_labels, std::span<const int> class_labels,
                         MatchRule rule) {
  const Confusion c = confusion(cluster_labels, class_labels);
  const double n = static_cast<double>(cluster_labels.size());
  if (rule == MatchRule::majority && c.clusters != c.classes) return (n - majority_hits(c)) / n;

  // Square up with zero-count dummies so leftover clusters or classes match nothing.
  const std::size_t size = std::max(c.clusters, c.classes);
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t g = 0; g < c.clusters; ++g) {
    for (std::size_t j = 0; j < c.classes; ++j) cost[g][j] = -static_cast<double>(c.counts[g][j]);
  }
  const auto match = min_cost_assignment(cost);
  double hits = 0.0;
  for (std::size_t g = 0; g < c.clusters; ++g) {
    if (match[g] < c.classes) hits += static_cast<double>(c.counts[g][match[g]]);
  }
  return (n - hits) / n;
}

}  // namespace smbp
