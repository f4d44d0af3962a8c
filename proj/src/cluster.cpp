#include "smbp/cluster.hpp"

#include <limits>
#include <string>

#include "smbp/error.hpp"

namespace smbp {

void ClusterConfig::validate() const {
  if (d < 1) throw Error(ErrorCode::invalid_input, "cluster dimension d must be at least 1");
  if (!(delta > 0.0)) throw Error(ErrorCode::invalid_input, "bandwidth scale delta must be positive");
  if (r < 1) throw Error(ErrorCode::invalid_input, "mode radius r must be at least 1");
  if (!(padding_bandwidths >= 0.0)) {
    throw Error(ErrorCode::invalid_input, "grid padding must be non-negative");
  }
}

namespace {

// Index into `candidates` of the row nearest to `x`; ties go to the first.
std::size_t nearest(const RowMatrix& scores, const std::vector<std::size_t>& candidates,
                    std::span<const double> x) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto row = row_span(scores, static_cast<Eigen::Index>(candidates[k]));
    double dist = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) dist += (row[j] - x[j]) * (row[j] - x[j]);
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

}  // namespace

DensityEstimate cluster_density_estimate(const RowMatrix& scores, const ClusterConfig& config) {
  config.validate();
  const Bandwidth bw = silverman_bandwidth(scores, config.bandwidth_rule).scaled(config.delta);
  const KernelSpec kernel{config.kernel, static_cast<std::size_t>(scores.cols())};
  const RegularGrid grid =
      build_grid(scores, config.resolved_cells(), config.padding_bandwidths, bw, config.cell_cap);
  return kde_on_grid(scores, bw, kernel, grid);
}

ClusterResult cluster_density(const FpcaModel& model, const RowMatrix& scores, DensityEstimate density,
                              std::size_t r) {
  const auto n = static_cast<std::size_t>(scores.rows());
  ClusterResult result;
  result.scores = scores;
  result.modes = find_modes(density, r);
  if (result.modes.modes.empty()) {
    throw Error(ErrorCode::degenerate_scores, "density estimate has no mode on the grid");
  }
  result.regions = extract_regions(density, result.modes);

  // Prototypes: scores whose cell lies in a region.
  std::vector<int> region_of(n, -1);
  std::vector<std::size_t> members(result.regions.regions.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cell = density.grid.locate(row_span(scores, static_cast<Eigen::Index>(i)));
    if (!cell) continue;
    const int g = result.regions.cell_region[*cell];
    if (g >= 0) {
      region_of[i] = g;
      ++members[static_cast<std::size_t>(g)];
    }
  }

  std::vector<int> group_of_region(result.regions.regions.size(), 0);
  for (std::size_t g = 0; g < result.regions.regions.size(); ++g) {
    if (members[g] == 0) {
      result.warnings.push_back("region of mode " + std::to_string(g + 1) +
                                " holds no observation and was dropped");
      continue;
    }
    result.group_mode.push_back(g);
    group_of_region[g] = static_cast<int>(result.group_mode.size());
  }
  result.g_hat = result.group_mode.size();
  if (result.g_hat == 0) {
    throw Error(ErrorCode::degenerate_scores, "no observation falls inside any mode region");
  }

  result.labels.assign(n, 0);
  result.prototype.assign(n, false);
  std::vector<std::size_t> prototypes;
  for (std::size_t i = 0; i < n; ++i) {
    if (region_of[i] < 0) continue;
    result.prototype[i] = true;
    result.labels[i] = group_of_region[static_cast<std::size_t>(region_of[i])];
    prototypes.push_back(i);
  }

  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    if (result.prototype[static_cast<std::size_t>(i)]) continue;
    const std::size_t k = nearest(scores, prototypes, row_span(scores, i));
    result.labels[static_cast<std::size_t>(i)] = result.labels[prototypes[k]];
  }

  result.modal_curves.resize(static_cast<Eigen::Index>(result.g_hat), static_cast<Eigen::Index>(model.grid.size()));
  for (std::size_t g = 0; g < result.g_hat; ++g) {
    const auto curve = modal_curve(model, result.modes.modes[result.group_mode[g]].center);
    for (std::size_t k = 0; k < curve.size(); ++k) {
      result.modal_curves(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(k)) = curve[k];
    }
  }
  result.density = std::move(density);
  return result;
}

ClusterResult cluster_scores(const FpcaModel& model, const RowMatrix& scores, const ClusterConfig& config) {
  return cluster_density(model, scores, cluster_density_estimate(scores, config), config.r);
}

ClusterResult cluster(const FunctionalSample& sample, const ClusterConfig& config, FpcaModel& model_out) {
  config.validate();
  if (sample.n() < 2) {
    throw Error(ErrorCode::sample_too_small, "clustering needs at least 2 curves");
  }
  model_out = fit_fpca(sample, max_components_for(sample));
  if (model_out.positive_components() < config.d) {
    throw Error(ErrorCode::insufficient_spectrum,
                "FPCA yields " + std::to_string(model_out.positive_components()) +
                    " positive eigenvalues, clustering needs d = " + std::to_string(config.d));
  }
  return cluster_scores(model_out, model_out.leading_scores(config.d), config);
}

ClusterResult cluster(const FunctionalSample& sample, const ClusterConfig& config) {
  // FpcaModel has no default state; seed it with a placeholder grid.
  FpcaModel model{sample.grid(), {}, {}, {}, {}, 0.0, {}};
  return cluster(sample, config, model);
}

int assign_new(const ClusterResult& result, const FpcaModel& model, std::span<const double> curve) {
  const auto d = static_cast<std::size_t>(result.scores.cols());
  const auto x = project(model, curve, d);
  std::vector<std::size_t> prototypes;
  for (std::size_t i = 0; i < result.prototype.size(); ++i) {
    if (result.prototype[i]) prototypes.push_back(i);
  }
  return result.labels[prototypes[nearest(result.scores, prototypes, x)]];
}

}  // namespace smbp
