#include "smbp/discriminant.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "smbp/error.hpp"
#include "smbp/fpca.hpp"
#include "smbp/random.hpp"

namespace smbp {

std::string_view to_string(CovarianceMode mode) {
  return mode == CovarianceMode::heteroscedastic ? "heteroscedastic" : "homoscedastic";
}

CovarianceMode parse_covariance_mode(std::string_view name) {
  if (name == "heteroscedastic") return CovarianceMode::heteroscedastic;
  if (name == "homoscedastic") return CovarianceMode::homoscedastic;
  throw Error(ErrorCode::invalid_input, "unknown covariance mode '" + std::string(name) + "'");
}

namespace {

std::vector<std::vector<std::size_t>> group_rows(std::span<const int> labels, std::size_t n) {
  if (labels.size() != n) {
    throw Error(ErrorCode::dimension_mismatch,
                "got " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " curves");
  }
  int G = 0;
  for (int l : labels) {
    if (l < 1) throw Error(ErrorCode::invalid_input, "group labels must be positive integers");
    G = std::max(G, l);
  }
  std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(G));
  for (std::size_t i = 0; i < n; ++i) rows[static_cast<std::size_t>(labels[i] - 1)].push_back(i);
  for (std::size_t g = 0; g < rows.size(); ++g) {
    if (rows[g].empty()) {
      throw Error(ErrorCode::missing_group,
                  "group " + std::to_string(g + 1) + " has no curves (labels must cover 1.." +
                      std::to_string(G) + ")");
    }
    if (rows[g].size() < 2) {
      throw Error(ErrorCode::group_too_small,
                  "group " + std::to_string(g + 1) + " has a single curve, need at least 2");
    }
  }
  return rows;
}

RowMatrix project_rows(const FunctionalSample& sample, std::span<const std::size_t> rows,
                       std::span<const double> mean, const RowMatrix& basis) {
  const auto m = sample.m();
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), basis.rows());
  std::vector<double> centered(m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto x = sample.curve(rows[r]);
    for (std::size_t k = 0; k < m; ++k) centered[k] = x[k] - mean[k];
    for (Eigen::Index j = 0; j < basis.rows(); ++j) {
      out(static_cast<Eigen::Index>(r), j) = inner_product(centered, row_span(basis, j), sample.grid());
    }
  }
  return out;
}

void require_spectrum(const FpcaModel& model, std::size_t d, const std::string& what) {
  if (model.positive_components() < d) {
    throw Error(ErrorCode::insufficient_spectrum,
                what + " has " + std::to_string(model.positive_components()) +
                    " positive eigenvalues, fewer than d = " + std::to_string(d));
  }
}

}  // namespace

ClassifierModel train(const FunctionalSample& sample, std::span<const int> labels, std::size_t d,
                      CovarianceMode mode, KernelProfile kernel) {
  if (d < 1) throw Error(ErrorCode::invalid_input, "projection dimension d must be at least 1");
  const auto rows = group_rows(labels, sample.n());
  const std::size_t G = rows.size();
  const double n = static_cast<double>(sample.n());
  const auto dd = static_cast<Eigen::Index>(d);

  ClassifierModel model{sample.grid(), std::vector<GroupModel>(G), d, mode, KernelSpec{kernel, d}};

  if (mode == CovarianceMode::heteroscedastic) {
    for (std::size_t g = 0; g < G; ++g) {
      const FunctionalSample sub = sample.subset(rows[g]);
      const FpcaModel fit = fit_fpca(sub, max_components_for(sub));
      require_spectrum(fit, d, "group " + std::to_string(g + 1));
      GroupModel& gm = model.groups[g];
      gm.mean = fit.mean;
      gm.basis = fit.eigenfunctions.topRows(dd);
      gm.scores = fit.leading_scores(d);
    }
  } else {
    // Pooled within-group covariance: FPCA of the group-centred residuals.
    RowMatrix residuals(sample.values().rows(), sample.values().cols());
    for (std::size_t g = 0; g < G; ++g) {
      const auto c = center(sample.subset(rows[g]));
      model.groups[g].mean = c.mean;
      for (std::size_t r = 0; r < rows[g].size(); ++r) {
        residuals.row(static_cast<Eigen::Index>(rows[g][r])) =
            c.centered.values().row(static_cast<Eigen::Index>(r));
      }
    }
    const FunctionalSample pooled(sample.grid(), std::move(residuals));
    const FpcaModel fit = fit_fpca(pooled, max_components_for(pooled));
    require_spectrum(fit, d, "pooled covariance");
    for (std::size_t g = 0; g < G; ++g) {
      GroupModel& gm = model.groups[g];
      gm.basis = fit.eigenfunctions.topRows(dd);
      gm.scores = project_rows(sample, rows[g], gm.mean, gm.basis);
    }
  }

  for (std::size_t g = 0; g < G; ++g) {
    GroupModel& gm = model.groups[g];
    gm.size = rows[g].size();
    gm.prior = static_cast<double>(gm.size) / n;
    gm.bandwidth = silverman_bandwidth(gm.scores);
  }
  return model;
}

Prediction predict(const ClassifierModel& model, std::span<const double> curve) {
  const std::size_t m = model.grid.size();
  if (curve.size() != m) {
    throw Error(ErrorCode::dimension_mismatch,
                "curve has " + std::to_string(curve.size()) + " values, model expects " +
                    std::to_string(m));
  }
  Prediction out;
  out.scores_per_group.resize(model.groups.size());
  std::vector<double> centered(m);
  std::vector<double> z(model.d);
  double best = -1.0;
  for (std::size_t g = 0; g < model.groups.size(); ++g) {
    const GroupModel& gm = model.groups[g];
    for (std::size_t k = 0; k < m; ++k) centered[k] = curve[k] - gm.mean[k];
    for (std::size_t j = 0; j < model.d; ++j) {
      z[j] = inner_product(centered, row_span(gm.basis, static_cast<Eigen::Index>(j)), model.grid);
    }
    const double value = gm.prior * kde_at(gm.scores, gm.bandwidth, model.kernel, z);
    out.scores_per_group[g] = value;
    if (value > best) {
      best = value;
      out.label = static_cast<int>(g + 1);
    }
  }
  out.zero_evidence = !(best > 0.0);
  if (out.zero_evidence) out.label = 1;
  return out;
}

std::vector<Prediction> predict_all(const ClassifierModel& model, const FunctionalSample& sample) {
  if (sample.m() != model.grid.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "curves have " + std::to_string(sample.m()) + " values, model expects " +
                    std::to_string(model.grid.size()));
  }
  std::vector<Prediction> out(sample.n());
  const auto count = static_cast<std::ptrdiff_t>(sample.n());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = predict(model, sample.curve(static_cast<std::size_t>(i)));
  }
  return out;
}

CrossValidationSummary cross_validate(const FunctionalSample& sample, std::span<const int> labels,
                                      std::size_t d, CovarianceMode mode, KernelProfile kernel,
                                      std::size_t repeats, double train_fraction, std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorCode::invalid_input, "cross-validation needs at least one repeat");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_input, "train fraction must lie in (0, 1)");
  }
  const auto rows = group_rows(labels, sample.n());
  std::vector<std::size_t> train_size(rows.size());
  std::size_t test_total = 0;
  for (std::size_t g = 0; g < rows.size(); ++g) {
    train_size[g] = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(rows[g].size())));
    if (train_size[g] < 2 || train_size[g] > rows[g].size()) {
      throw Error(ErrorCode::infeasible_folds,
                  "group " + std::to_string(g + 1) + " of " + std::to_string(rows[g].size()) +
                      " curves leaves " + std::to_string(train_size[g]) +
                      " for training; at least 2 are required");
    }
    test_total += rows[g].size() - train_size[g];
  }
  if (test_total == 0) {
    throw Error(ErrorCode::infeasible_folds, "train fraction leaves no curve for testing");
  }

  CrossValidationSummary summary;
  summary.errors.assign(repeats, 0.0);
  std::vector<std::exception_ptr> failures(repeats);
  const auto count = static_cast<std::ptrdiff_t>(repeats);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t rep = 0; rep < count; ++rep) {
    try {
      Stream stream(seed, StreamPurpose::cv_repeat, static_cast<std::uint64_t>(rep));
      std::vector<std::size_t> train_rows, test_rows;
      std::vector<int> train_labels, test_labels;
      for (std::size_t g = 0; g < rows.size(); ++g) {
        std::vector<std::size_t> idx = rows[g];
        // Fisher-Yates on our own stream: std::shuffle is not portable
        for (std::size_t i = idx.size(); i > 1; --i) {
          std::swap(idx[i - 1], idx[stream.below(i)]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
          auto& dest = i < train_size[g] ? train_rows : test_rows;
          auto& dest_labels = i < train_size[g] ? train_labels : test_labels;
          dest.push_back(idx[i]);
          dest_labels.push_back(static_cast<int>(g + 1));
        }
      }
      const ClassifierModel model = train(sample.subset(train_rows), train_labels, d, mode, kernel);
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        if (predict(model, sample.curve(test_rows[i])).label != test_labels[i]) ++wrong;
      }
      summary.errors[static_cast<std::size_t>(rep)] =
          static_cast<double>(wrong) / static_cast<double>(test_rows.size());
    } catch (...) {
      failures[static_cast<std::size_t>(rep)] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  for (double e : summary.errors) summary.mean += e;
  summary.mean /= static_cast<double>(repeats);
  if (repeats > 1) {
    double ss = 0.0;
    for (double e : summary.errors) ss += (e - summary.mean) * (e - summary.mean);
    summary.sd = std::sqrt(ss / static_cast<double>(repeats - 1));
  }
  return summary;
}

}  // namespace smbp
