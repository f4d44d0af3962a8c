#include "smbp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "smbp/error.hpp"

namespace smbp {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorCode::parse_error,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

double parse_value(std::string_view field, std::size_t line, std::size_t column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    parse_fail(line, column, "cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(v)) parse_fail(line, column, "non-finite value '" + std::string(field) + "'");
  return v;
}

int parse_label(std::string_view field, std::size_t line, std::size_t column) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(line, column, "cannot parse '" + std::string(field) + "' as an integer label");
  }
  return v;
}

json vec(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(json_number(x));
  return out;
}

json mat(const RowMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(row_span(m, i)));
  return out;
}

std::vector<double> vec_from(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

RowMatrix mat_from(const json& j, Eigen::Index cols) {
  RowMatrix out(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = vec_from(j[i]);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::parse_error, "matrix row " + std::to_string(i + 1) + " has " +
                                              std::to_string(row.size()) + " entries, expected " +
                                              std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)];
  }
  return out;
}

std::string optional_number(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string("NA");
}

}  // namespace

CurveFile parse_curves(std::istream& in) {
  std::optional<std::vector<double>> grid_points;
  bool has_label = false;
  std::optional<std::size_t> expected;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (body.rfind("grid:", 0) == 0) {
        if (!rows.empty()) parse_fail(line_no, 1, "grid header after the first curve");
        const auto fields = split(body.substr(5));
        std::vector<double> pts;
        for (std::size_t c = 0; c < fields.size(); ++c) pts.push_back(parse_value(fields[c], line_no, c + 1));
        grid_points = std::move(pts);
      } else if (body == "label") {
        if (!rows.empty()) parse_fail(line_no, 1, "label declaration after the first curve");
        has_label = true;
      }
      continue;
    }
    const auto fields = split(line);
    if (!expected) {
      expected = grid_points ? grid_points->size() + (has_label ? 1 : 0) : fields.size();
    }
    if (fields.size() != *expected) {
      throw Error(ErrorCode::parse_error, "row " + std::to_string(rows.size() + 1) + " has " +
                                              std::to_string(fields.size()) + " values, expected " +
                                              std::to_string(*expected) + " (line " +
                                              std::to_string(line_no) + ")");
    }
    const std::size_t m = has_label ? fields.size() - 1 : fields.size();
    std::vector<double> row(m);
    for (std::size_t c = 0; c < m; ++c) row[c] = parse_value(fields[c], line_no, c + 1);
    if (has_label) labels.push_back(parse_label(fields.back(), line_no, fields.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::parse_error, "no curves found");
  const std::size_t m = rows.front().size();
  if (m < 2) throw Error(ErrorCode::insufficient_points, "curves need at least 2 values");

  RowMatrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < m; ++k) values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  AbscissaGrid grid = grid_points ? AbscissaGrid(std::move(*grid_points)) : AbscissaGrid::equispaced(m);
  CurveFile out{FunctionalSample(std::move(grid), std::move(values)), std::nullopt};
  if (has_label) out.labels = std::move(labels);
  return out;
}

CurveFile read_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "' for reading");
  return parse_curves(in);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string curves_csv(const FunctionalSample& sample, std::optional<std::span<const int>> labels) {
  if (labels && labels->size() != sample.n()) {
    throw Error(ErrorCode::dimension_mismatch, "one label per curve is required");
  }
  std::string out = "# grid: ";
  const auto& pts = sample.grid().points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) out += ',';
    out += format_double(pts[k]);
  }
  out += '\n';
  if (labels) out += "# label\n";
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const auto x = sample.curve(i);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k) out += ',';
      out += format_double(x[k]);
    }
    if (labels) out += ',' + std::to_string((*labels)[i]);
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string labels_csv(const ClusterResult& result) {
  std::string out = "index,label,prototype\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    out += std::to_string(i + 1) + ',' + std::to_string(result.labels[i]) + ',' +
           (result.prototype[i] ? "1" : "0") + '\n';
  }
  return out;
}

std::string modal_curves_csv(const ClusterResult& result, const AbscissaGrid& grid) {
  return curves_csv(FunctionalSample(grid, result.modal_curves));
}

std::string density_csv(const DensityEstimate& density) {
  const auto& grid = density.grid;
  const std::size_t d = grid.dim();
  std::string out;
  for (std::size_t j = 0; j < d; ++j) out += "i" + std::to_string(j + 1) + ',';
  for (std::size_t j = 0; j < d; ++j) out += "center" + std::to_string(j + 1) + ',';
  out += "value\n";
  std::vector<std::size_t> index(d);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    grid.unravel(c, index);
    for (std::size_t j = 0; j < d; ++j) out += std::to_string(index[j] + 1) + ',';
    for (std::size_t j = 0; j < d; ++j) out += format_double(grid.center(j, index[j])) + ',';
    out += format_double(density.values[c]) + '\n';
  }
  return out;
}

std::string regions_csv(const DensityEstimate& density, const RegionSet& regions) {
  const auto& grid = density.grid;
  const std::size_t d = grid.dim();
  std::string out = "region_id";
  for (std::size_t j = 0; j < d; ++j) out += ",i" + std::to_string(j + 1);
  out += '\n';
  std::vector<std::size_t> index(d);
  for (std::size_t r = 0; r < regions.regions.size(); ++r) {
    for (std::size_t c : regions.regions[r].cells) {
      grid.unravel(c, index);
      out += std::to_string(r + 1);
      for (std::size_t j = 0; j < d; ++j) out += ',' + std::to_string(index[j] + 1);
      out += '\n';
    }
  }
  return out;
}

std::string gridsearch_csv(const GridSearchResult& result) {
  std::string out = "delta,r,k,ch,purity,misclassification\n";
  for (const auto& row : result.rows) {
    out += format_double(row.delta) + ',' + std::to_string(row.r) + ',';
    if (!row.error.empty()) {
      out += "NA,NA,NA,NA\n";
      continue;
    }
    const bool labelled = row.scores.misclassification.has_value();
    out += std::to_string(row.scores.k_used) + ',' + format_double(row.scores.ch) + ',' +
           (labelled ? format_double(row.scores.purity) : std::string("NA")) + ',' +
           optional_number(row.scores.misclassification) + '\n';
  }
  return out;
}

std::string predictions_csv(std::span<const Prediction> predictions) {
  const std::size_t G = predictions.empty() ? 0 : predictions.front().scores_per_group.size();
  std::string out = "index,label";
  for (std::size_t g = 0; g < G; ++g) out += ",score_" + std::to_string(g + 1);
  out += ",zero_evidence\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out += std::to_string(i + 1) + ',' + std::to_string(predictions[i].label);
    for (double s : predictions[i].scores_per_group) out += ',' + format_double(s);
    out += predictions[i].zero_evidence ? ",1\n" : ",0\n";
  }
  return out;
}

std::string replicates_csv(const ExperimentReport& report, bool with_timing) {
  std::string out = "replicate,setting,seed,g_hat,misclassification,purity,ch";
  if (with_timing) out += ",wall_seconds";
  out += ",error\n";
  for (const auto& rec : report.records) {
    out += std::to_string(rec.replicate + 1) + ",\"" + rec.setting + "\"," + std::to_string(rec.seed) + ',';
    if (rec.error.empty()) {
      out += std::to_string(rec.g_hat) + ',' + format_double(rec.misclassification) + ',' +
             format_double(rec.purity) + ',' + format_double(rec.ch);
    } else {
      out += "NA,NA,NA,NA";
    }
    if (with_timing) out += ',' + format_double(rec.wall_seconds);
    std::string err = rec.error;
    for (char& c : err) {
      if (c == '"') c = '\'';
      if (c == '\n') c = ' ';
    }
    out += ",\"" + err + "\"\n";
  }
  return out;
}

nlohmann::json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::parse_error, "expected a number, got " + j.dump());
}

nlohmann::json to_json(const FpcaModel& model) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["grid"] = vec(model.grid.points());
  j["n"] = model.scores.rows();
  j["mean"] = vec(model.mean);
  j["eigenvalues"] = vec(model.eigenvalues);
  j["eigenfunctions"] = mat(model.eigenfunctions);
  j["fev"] = vec(model.fev);
  j["total_variance"] = json_number(model.total_variance);
  return j;
}

nlohmann::json to_json(const DecayReport& report) {
  json j;
  j["C"] = json_number(report.C);
  j["tail_tol"] = json_number(report.tail_tol);
  j["tail_begin"] = report.tail_begin;
  j["exponential"] = vec(report.exponential);
  j["ratio"] = vec(report.ratio);
  j["hyper"] = vec(report.hyper);
  j["exponential_test"] = report.exponential_test;
  j["super_test"] = report.super_test;
  j["hyper_test"] = report.hyper_test;
  j["classification"] = std::string(to_string(report.classification));
  return j;
}

nlohmann::json to_json(const HorseshoeConfig& config) {
  json j;
  j["n1"] = config.n1;
  j["n2"] = config.n2;
  j["k"] = json_number(config.k);
  j["sigma"] = json_number(config.sigma);
  j["L"] = config.L;
  j["m"] = config.m;
  j["seed"] = config.seed;
  j["pi1"] = config.pi1 ? json_number(*config.pi1) : json(nullptr);
  j["shift"] = config.shift == ShiftRule::power ? "power" : "signed";
  return j;
}

nlohmann::json to_json(const ClusterConfig& config) {
  json j;
  j["d"] = config.d;
  j["delta"] = json_number(config.delta);
  j["r"] = config.r;
  j["cells_per_axis"] = config.resolved_cells();
  j["kernel"] = std::string(to_string(config.kernel));
  j["padding_bandwidths"] = json_number(config.padding_bandwidths);
  j["cell_cap"] = config.cell_cap;
  j["bandwidth_rule"] = std::string(to_string(config.bandwidth_rule));
  return j;
}

nlohmann::json to_json(const ExperimentReport& report, bool with_timing) {
  json j;
  j["failures"] = report.failures;
  json records = json::array();
  for (const auto& rec : report.records) {
    json r;
    r["replicate"] = rec.replicate + 1;
    r["setting"] = rec.setting;
    r["seed"] = rec.seed;
    if (rec.error.empty()) {
      r["g_hat"] = rec.g_hat;
      r["misclassification"] = json_number(rec.misclassification);
      r["purity"] = json_number(rec.purity);
      r["ch"] = json_number(rec.ch);
    } else {
      r["error"] = rec.error;
    }
    if (with_timing) r["wall_seconds"] = rec.wall_seconds;
    records.push_back(std::move(r));
  }
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"setting", s.setting},
                         {"completed", s.completed},
                         {"failed", s.failed},
                         {"mean_misclassification", json_number(s.mean_misclassification)},
                         {"sd_misclassification", json_number(s.sd_misclassification)},
                         {"mean_purity", json_number(s.mean_purity)},
                         {"q50_g_hat", json_number(s.q50_g_hat)},
                         {"q75_g_hat", json_number(s.q75_g_hat)},
                         {"q90_g_hat", json_number(s.q90_g_hat)},
                         {"share_g_hat_2", json_number(s.share_g_hat_2)}});
  }
  j["summaries"] = std::move(summaries);
  j["records"] = std::move(records);
  return j;
}

nlohmann::json to_json(const DiscriminantReport& report) {
  json j;
  j["data_seed"] = report.data_seed;
  j["priors"] = vec(report.priors);
  j["failures"] = report.failures;
  json per_d = json::array();
  for (const auto& r : report.per_d) {
    json e;
    e["d"] = r.d;
    if (r.error.empty()) {
      e["mean_error"] = json_number(r.cv.mean);
      e["sd_error"] = json_number(r.cv.sd);
      e["errors"] = vec(r.cv.errors);
    } else {
      e["error"] = r.error;
    }
    per_d.push_back(std::move(e));
  }
  j["per_d"] = std::move(per_d);
  return j;
}

nlohmann::json to_json(const GridSearchResult& result) {
  json j;
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r;
    r["delta"] = json_number(row.delta);
    r["r"] = row.r;
    if (row.error.empty()) {
      r["k"] = row.scores.k_used;
      r["ch"] = json_number(row.scores.ch);
      if (row.scores.misclassification) {
        r["purity"] = json_number(row.scores.purity);
        r["misclassification"] = json_number(*row.scores.misclassification);
      }
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  if (result.best) {
    const auto& b = result.rows[*result.best];
    j["best"] = {{"delta", json_number(b.delta)}, {"r", b.r}, {"k", b.scores.k_used}};
  } else {
    j["best"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const ClassifierModel& model) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = model.d;
  j["mode"] = std::string(to_string(model.mode));
  j["kernel"] = std::string(to_string(model.kernel.profile));
  j["grid"] = vec(model.grid.points());
  json groups = json::array();
  for (const auto& g : model.groups) {
    json e;
    e["prior"] = json_number(g.prior);
    e["size"] = g.size;
    e["mean"] = vec(g.mean);
    e["basis"] = mat(g.basis);
    e["scores"] = mat(g.scores);
    e["bandwidth"] = {{"h", vec(g.bandwidth.h)}, {"delta", json_number(g.bandwidth.delta)}};
    groups.push_back(std::move(e));
  }
  j["groups"] = std::move(groups);
  return j;
}

ClassifierModel classifier_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorCode::parse_error, "unsupported model schema_version " + j.at("schema_version").dump());
    }
    const auto d = j.at("d").get<std::size_t>();
    if (d < 1) throw Error(ErrorCode::parse_error, "model d must be at least 1");
    ClassifierModel model{AbscissaGrid(vec_from(j.at("grid"))), {}, d,
                          parse_covariance_mode(j.at("mode").get<std::string>()),
                          KernelSpec{parse_kernel(j.at("kernel").get<std::string>()), d}};
    const auto m = static_cast<Eigen::Index>(model.grid.size());
    for (const auto& e : j.at("groups")) {
      GroupModel g;
      g.prior = number_from_json(e.at("prior"));
      g.size = e.at("size").get<std::size_t>();
      g.mean = vec_from(e.at("mean"));
      g.basis = mat_from(e.at("basis"), m);
      g.scores = mat_from(e.at("scores"), static_cast<Eigen::Index>(d));
      g.bandwidth.h = vec_from(e.at("bandwidth").at("h"));
      g.bandwidth.delta = number_from_json(e.at("bandwidth").at("delta"));
      if (g.mean.size() != model.grid.size() || static_cast<std::size_t>(g.basis.rows()) != d ||
          g.bandwidth.h.size() != d || g.scores.rows() < 1) {
        throw Error(ErrorCode::parse_error, "group entry does not match the model dimensions");
      }
      model.groups.push_back(std::move(g));
    }
    if (model.groups.empty()) throw Error(ErrorCode::parse_error, "model has no groups");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed model JSON: ") + e.what());
  }
}

nlohmann::json cluster_summary(const ClusterResult& result) {
  json j;
  j["g_hat"] = result.g_hat;
  json modes = json::array();
  for (std::size_t g = 0; g < result.group_mode.size(); ++g) {
    const std::size_t pos = result.group_mode[g];
    const Mode& mode = result.modes.modes[pos];
    std::size_t size = 0, prototypes = 0;
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
      if (result.labels[i] != static_cast<int>(g + 1)) continue;
      ++size;
      if (result.prototype[i]) ++prototypes;
    }
    json index = json::array();
    for (std::size_t v : mode.index) index.push_back(v + 1);
    modes.push_back({{"group", g + 1},
                     {"center", vec(mode.center)},
                     {"cell", index},
                     {"density", json_number(mode.value)},
                     {"threshold", json_number(result.regions.regions[pos].threshold)},
                     {"region_cells", result.regions.regions[pos].cells.size()},
                     {"size", size},
                     {"prototypes", prototypes}});
  }
  j["groups"] = std::move(modes);
  j["retained_modes"] = result.modes.modes.size();
  j["warnings"] = result.warnings;
  return j;
}

}  // namespace smbp
