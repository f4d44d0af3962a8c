#include "smbp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <sstream>

#include "smbp/error.hpp"
#include "smbp/random.hpp"

namespace smbp {

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SettingSummary> summarize(std::span<const ReplicateRecord> records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReplicateRecord*>> by_setting;
  for (const auto& rec : records) {
    auto [it, inserted] = by_setting.try_emplace(rec.setting);
    if (inserted) order.push_back(rec.setting);
    it->second.push_back(&rec);
  }
  std::vector<SettingSummary> out;
  for (const auto& name : order) {
    SettingSummary s;
    s.setting = name;
    std::vector<double> g_hat, errors;
    double purity_sum = 0.0;
    std::size_t twos = 0;
    for (const auto* rec : by_setting[name]) {
      if (!rec->error.empty()) {
        ++s.failed;
        continue;
      }
      g_hat.push_back(static_cast<double>(rec->g_hat));
      errors.push_back(rec->misclassification);
      purity_sum += rec->purity;
      if (rec->g_hat == 2) ++twos;
    }
    s.completed = errors.size();
    if (s.completed > 0) {
      const double c = static_cast<double>(s.completed);
      for (double e : errors) s.mean_misclassification += e;
      s.mean_misclassification /= c;
      if (s.completed > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - s.mean_misclassification) * (e - s.mean_misclassification);
        s.sd_misclassification = std::sqrt(ss / (c - 1.0));
      }
      s.mean_purity = purity_sum / c;
      s.q50_g_hat = quantile(g_hat, 0.5);
      s.q75_g_hat = quantile(g_hat, 0.75);
      s.q90_g_hat = quantile(g_hat, 0.9);
      s.share_g_hat_2 = static_cast<double>(twos) / c;
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string setting_name(const ClusterSetting& s) {
  std::ostringstream os;
  os << "d=" << s.d << ",delta=" << s.delta << ",r=" << s.r;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_scores(ReplicateRecord& rec, const RowMatrix& scores, std::span<const int> labels,
                 std::span<const int> truth, MatchRule match) {
  rec.misclassification = misclassification(labels, truth, match);
  rec.purity = purity(labels, truth);
  rec.ch = calinski_harabasz(scores, labels);
}

}  // namespace

ExperimentReport run_clustering_experiment(const ClusteringExperiment& experiment) {
  if (experiment.replicates < 1) {
    throw Error(ErrorCode::invalid_input, "experiment needs at least one replicate");
  }
  if (experiment.settings.empty() && experiment.kmeans_k == 0) {
    throw Error(ErrorCode::invalid_input, "experiment has no clustering setting");
  }
  experiment.data.validate();
  for (const auto& s : experiment.settings) {
    ClusterConfig{s.d, s.delta, s.r}.validate();
  }

  const std::size_t per_replicate = experiment.settings.size() + (experiment.kmeans_k ? 1 : 0);
  std::vector<ReplicateRecord> records(experiment.replicates * per_replicate);
  const auto count = static_cast<std::ptrdiff_t>(experiment.replicates);

#pragma omp parallel for schedule(dynamic, 1) if (experiment.parallel)
  for (std::ptrdiff_t rep = 0; rep < count; ++rep) {
    const auto r = static_cast<std::size_t>(rep);
    const std::uint64_t seed = derive_seed(experiment.base_seed, StreamPurpose::replicate, r);
    ReplicateRecord* slot = records.data() + r * per_replicate;
    for (std::size_t s = 0; s < per_replicate; ++s) {
      slot[s].replicate = r;
      slot[s].seed = seed;
      slot[s].setting = s < experiment.settings.size()
                            ? setting_name(experiment.settings[s])
                            : "kmeans,k=" + std::to_string(experiment.kmeans_k);
    }

    std::optional<SimulatedData> data;
    std::optional<FpcaModel> model;
    try {
      HorseshoeConfig cfg = experiment.data;
      cfg.seed = seed;
      data = generate(cfg);
      model = fit_fpca(data->sample, max_components_for(data->sample));
    } catch (const std::exception& e) {
      for (std::size_t s = 0; s < per_replicate; ++s) slot[s].error = e.what();
      continue;
    }

    // One density per (d, delta), shared by every r.
    std::map<std::pair<std::size_t, double>, DensityEstimate> densities;
    for (std::size_t s = 0; s < experiment.settings.size(); ++s) {
      const auto start = std::chrono::steady_clock::now();
      const ClusterSetting& setting = experiment.settings[s];
      try {
        if (model->positive_components() < setting.d) {
          throw Error(ErrorCode::insufficient_spectrum, "too few positive eigenvalues for d");
        }
        const RowMatrix scores = model->leading_scores(setting.d);
        ClusterConfig config{setting.d, setting.delta, setting.r, experiment.cells_per_axis,
                             experiment.kernel, experiment.padding_bandwidths};
        config.bandwidth_rule = experiment.bandwidth_rule;
        const auto key = std::make_pair(setting.d, setting.delta);
        auto it = densities.find(key);
        if (it == densities.end()) {
          it = densities.emplace(key, cluster_density_estimate(scores, config)).first;
        }
        const ClusterResult result = cluster_density(*model, scores, it->second, setting.r);
        slot[s].g_hat = result.g_hat;
        fill_scores(slot[s], scores, result.labels, data->labels, experiment.match);
      } catch (const std::exception& e) {
        slot[s].error = e.what();
      }
      slot[s].wall_seconds = seconds_since(start);
    }

    if (experiment.kmeans_k) {
      ReplicateRecord& rec = slot[per_replicate - 1];
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::size_t d = experiment.settings.empty() ? 3 : experiment.settings.front().d;
        const RowMatrix scores = model->leading_scores(d);
        const KMeansResult km = kmeans_baseline(
            scores, experiment.kmeans_k, derive_seed(seed, StreamPurpose::kmeans, 0), experiment.kmeans_restarts);
        std::size_t distinct = 0;
        {
          std::vector<int> sorted = km.labels;
          std::sort(sorted.begin(), sorted.end());
          distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        }
        rec.g_hat = distinct;
        fill_scores(rec, scores, km.labels, data->labels, experiment.match);
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.wall_seconds = seconds_since(start);
    }
  }

  ExperimentReport report;
  report.records = std::move(records);
  for (const auto& rec : report.records) {
    if (!rec.error.empty()) ++report.failures;
  }
  report.summaries = summarize(report.records);
  return report;
}

DiscriminantReport run_discriminant_experiment(const DiscriminantExperiment& experiment) {
  if (experiment.d_list.empty()) throw Error(ErrorCode::invalid_input, "no projection dimension given");
  experiment.data.validate();
  DiscriminantReport report;
  HorseshoeConfig cfg = experiment.data;
  cfg.seed = derive_seed(experiment.base_seed, StreamPurpose::replicate, 0);
  report.data_seed = cfg.seed;
  const SimulatedData data = generate(cfg);

  int G = 0;
  for (int l : data.labels) G = std::max(G, l);
  report.priors.assign(static_cast<std::size_t>(G), 0.0);
  for (int l : data.labels) report.priors[static_cast<std::size_t>(l - 1)] += 1.0;
  for (double& p : report.priors) p /= static_cast<double>(data.labels.size());

  const std::uint64_t cv_seed = derive_seed(experiment.base_seed, StreamPurpose::split, 0);
  for (std::size_t d : experiment.d_list) {
    DiscriminantResult res;
    res.d = d;
    try {
      // Same splits for every d: the comparison across d is paired.
      res.cv = cross_validate(data.sample, data.labels, d, experiment.mode, experiment.kernel,
                              experiment.repeats, experiment.train_fraction, cv_seed);
    } catch (const std::exception& e) {
      res.error = e.what();
      ++report.failures;
    }
    report.per_d.push_back(std::move(res));
  }
  return report;
}

KMeansResult kmeans_baseline(const RowMatrix& points, std::size_t k, std::uint64_t seed,
                             std::size_t restarts) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto d = static_cast<std::size_t>(points.cols());
  if (k < 1 || n < k) {
    throw Error(ErrorCode::infeasible_k,
                "k-means needs 1 <= k <= n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
  }
  if (restarts < 1) restarts = 1;

  auto sq_dist = [&](std::size_t i, const std::vector<double>& c, std::size_t which) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - c[which * d + j];
      acc += diff * diff;
    }
    return acc;
  };

  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
    Stream stream(seed, StreamPurpose::kmeans, attempt);
    std::vector<double> centers(k * d);
    auto set_center = [&](std::size_t c, std::size_t i) {
      for (std::size_t j = 0; j < d; ++j) {
        centers[c * d + j] = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    };
    // k-means++ seeding
    set_center(0, stream.below(n));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = std::min(nearest[i], sq_dist(i, centers, c - 1));
        total += nearest[i];
      }
      std::size_t pick = n - 1;
      if (total > 0.0) {
        const double target = stream.uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += nearest[i];
          if (target < acc && nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = stream.below(n);
      }
      set_center(c, pick);
    }

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        double bd = sq_dist(i, centers, 0);
        for (std::size_t c = 1; c < k; ++c) {
          const double dist = sq_dist(i, centers, c);
          if (dist < bd) {
            bd = dist;
            arg = c;
          }
        }
        if (assign[i] != static_cast<int>(arg)) {
          assign[i] = static_cast<int>(arg);
          changed = true;
        }
      }
      if (!changed) break;
      std::vector<double> sum(k * d, 0.0);
      std::vector<std::size_t> size(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(assign[i]);
        ++size[c];
        for (std::size_t j = 0; j < d; ++j) {
          sum[c * d + j] += points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (size[c] == 0) continue;  // empty cluster keeps its centre
        for (std::size_t j = 0; j < d; ++j) centers[c * d + j] = sum[c * d + j] / static_cast<double>(size[c]);
      }
    }

    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) wcss += sq_dist(i, centers, static_cast<std::size_t>(assign[i]));
    if (wcss < best.wcss) {
      best.wcss = wcss;
      best.labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) best.labels[i] = assign[i] + 1;
    }
  }
  return best;
}

GridSearchResult grid_search(const FunctionalSample& sample, const ClusterConfig& base,
                             std::span<const double> delta_grid, std::span<const std::size_t> r_grid,
                             std::optional<std::span<const int>> class_labels) {
  if (delta_grid.empty() || r_grid.empty()) {
    throw Error(ErrorCode::invalid_input, "grid search needs at least one delta and one r");
  }
  if (class_labels && class_labels->size() != sample.n()) {
    throw Error(ErrorCode::dimension_mismatch, "one class label per curve is required");
  }
  base.validate();
  const FpcaModel model = fit_fpca(sample, max_components_for(sample));
  if (model.positive_components() < base.d) {
    throw Error(ErrorCode::insufficient_spectrum,
                "FPCA yields fewer positive eigenvalues than d = " + std::to_string(base.d));
  }
  const RowMatrix scores = model.leading_scores(base.d);

  GridSearchResult out;
  for (double delta : delta_grid) {
    ClusterConfig config = base;
    config.delta = delta;
    std::optional<DensityEstimate> density;
    std::string density_error;
    try {
      density = cluster_density_estimate(scores, config);
    } catch (const std::exception& e) {
      density_error = e.what();
    }
    for (std::size_t r : r_grid) {
      GridSearchRow row;
      row.delta = delta;
      row.r = r;
      if (!density) {
        row.error = density_error;
        out.rows.push_back(std::move(row));
        continue;
      }
      try {
        const ClusterResult result = cluster_density(model, scores, *density, r);
        row.scores.k_used = result.g_hat;
        row.scores.ch = calinski_harabasz(scores, result.labels);
        if (class_labels) {
          row.scores.purity = purity(result.labels, *class_labels);
          row.scores.misclassification = misclassification(result.labels, *class_labels);
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
  }

  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    if (!row.error.empty()) continue;
    if (!out.best) {
      out.best = i;
      continue;
    }
    const auto& cur = out.rows[*out.best];
    const bool better =
        row.scores.ch > cur.scores.ch ||
        (row.scores.ch == cur.scores.ch &&
         (row.delta > cur.delta || (row.delta == cur.delta && row.r > cur.r)));
    if (better) out.best = i;
  }
  return out;
}

}  // namespace smbp
