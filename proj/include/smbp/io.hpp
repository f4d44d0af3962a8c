#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "smbp/cluster.hpp"
#include "smbp/decay.hpp"
#include "smbp/discriminant.hpp"
#include "smbp/fpca.hpp"
#include "smbp/harness.hpp"
#include "smbp/simulate.hpp"

namespace smbp {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

struct CurveFile {
  FunctionalSample sample;
  std::optional<std::vector<int>> labels;
};

// Curve CSV:
//   # grid: t1,...,tm      optional, equispaced [0,1] otherwise
//   # label                optional, declares a trailing integer label column
//   x11,...,x1m[,label]
// Blank lines and other '#' lines are skipped.
CurveFile parse_curves(std::istream& in);
CurveFile read_curves(const std::filesystem::path& path);

std::string curves_csv(const FunctionalSample& sample,
                       std::optional<std::span<const int>> labels = std::nullopt);

/// %.17g, enough to round-trip any double.
std::string format_double(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Flat CSV outputs
std::string labels_csv(const ClusterResult& result);
std::string modal_curves_csv(const ClusterResult& result, const AbscissaGrid& grid);
std::string density_csv(const DensityEstimate& density);
std::string regions_csv(const DensityEstimate& density, const RegionSet& regions);
std::string gridsearch_csv(const GridSearchResult& result);
std::string predictions_csv(std::span<const Prediction> predictions);
std::string replicates_csv(const ExperimentReport& report, bool with_timing);

// JSON documents. Non-finite doubles are written as the strings "inf",
// "-inf" or "nan".
nlohmann::json json_number(double x);
double number_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FpcaModel& model);
nlohmann::json to_json(const DecayReport& report);
nlohmann::json to_json(const HorseshoeConfig& config);
nlohmann::json to_json(const ClusterConfig& config);
nlohmann::json to_json(const ExperimentReport& report, bool with_timing);
nlohmann::json to_json(const DiscriminantReport& report);
nlohmann::json to_json(const GridSearchResult& result);
nlohmann::json to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& j);

/// Modes, region thresholds and group sizes of one clustering run.
nlohmann::json cluster_summary(const ClusterResult& result);

}  // namespace smbp
