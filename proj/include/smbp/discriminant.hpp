#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smbp/density.hpp"
#include "smbp/funcdata.hpp"

namespace smbp {

enum class CovarianceMode { heteroscedastic, homoscedastic };

std::string_view to_string(CovarianceMode mode);
CovarianceMode parse_covariance_mode(std::string_view name);

struct GroupModel {
  double prior = 0.0;  // n_g / n
  std::size_t size = 0;
  std::vector<double> mean;
  RowMatrix basis;   // d x m, orthonormal under the grid inner product
  RowMatrix scores;  // n_g x d training scores
  Bandwidth bandwidth;
};

/// Kernel Bayes classifier on projected scores: label = argmax_g prior_g * fhat_g(x).
struct ClassifierModel {
  AbscissaGrid grid;
  std::vector<GroupModel> groups;  // group g + 1 at position g
  std::size_t d = 0;
  CovarianceMode mode = CovarianceMode::heteroscedastic;
  KernelSpec kernel;
};

struct Prediction {
  int label = 1;
  std::vector<double> scores_per_group;
  bool zero_evidence = false;  // every discriminant value was 0
};

/// Labels must cover 1..G with at least two curves per group.
ClassifierModel train(const FunctionalSample& sample, std::span<const int> labels, std::size_t d,
                      CovarianceMode mode = CovarianceMode::heteroscedastic,
                      KernelProfile kernel = KernelProfile::gaussian);

Prediction predict(const ClassifierModel& model, std::span<const double> curve);

/// Predictions for every curve of `sample`, parallel over curves.
std::vector<Prediction> predict_all(const ClassifierModel& model, const FunctionalSample& sample);

struct CrossValidationSummary {
  double mean = 0.0;
  double sd = 0.0;  // divisor repeats - 1; 0 for one repeat
  std::vector<double> errors;
};

/// Repeated stratified random splits: train on `train_fraction` of every
/// group, report the error rate on the rest. Repeat r draws its split from
/// an independent stream derived from (seed, r).
CrossValidationSummary cross_validate(const FunctionalSample& sample, std::span<const int> labels,
                                      std::size_t d, CovarianceMode mode, KernelProfile kernel,
                                      std::size_t repeats, double train_fraction, std::uint64_t seed);

}  // namespace smbp
