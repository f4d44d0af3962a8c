// smbp: command-line front end for surrogate-density clustering and
// classification of functional data.

#include <omp.h>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "smbp/cluster.hpp"
#include "smbp/decay.hpp"
#include "smbp/discriminant.hpp"
#include "smbp/error.hpp"
#include "smbp/fpca.hpp"
#include "smbp/harness.hpp"
#include "smbp/io.hpp"
#include "smbp/random.hpp"
#include "smbp/simulate.hpp"

namespace {

using nlohmann::json;
using namespace smbp;

struct Common {
  int threads = 0;
  bool record_timing = false;
};

struct SeedOption {
  std::optional<std::uint64_t> value;

  std::uint64_t resolve() {
    if (!value) {
      std::random_device rd;
      value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      std::cerr << "seed: " << *value << "\n";
    }
    return *value;
  }
};

json run_report(const std::string& command, const Common& common) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["versions"] = {{"smbp", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                 "." + std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  if (common.threads > 0) j["threads"] = common.threads;
  return j;
}

void finish_report(json& report, const std::string& path, const Common& common,
                   std::chrono::steady_clock::time_point start) {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "wall time: " << seconds << " s\n";
  if (common.record_timing) report["wall_seconds"] = seconds;
  write_text(path, report.dump(2) + "\n");
}

FunctionalSample maybe_derivative(FunctionalSample sample, bool derivative) {
  return derivative ? second_derivative(sample) : std::move(sample);
}

void add_simulation_options(CLI::App* app, HorseshoeConfig& cfg, std::string& shift, std::optional<double>& pi1) {
  app->add_option("--n1", cfg.n1, "curves in group 1")->capture_default_str();
  app->add_option("--n2", cfg.n2, "curves in group 2")->capture_default_str();
  app->add_option("--k", cfg.k, "vertical translation of the horseshoes")->capture_default_str();
  app->add_option("--sigma", cfg.sigma, "noise standard deviation")->capture_default_str();
  app->add_option("--L", cfg.L, "basis size")->capture_default_str();
  app->add_option("--m", cfg.m, "discretization points on [0,1]")->capture_default_str();
  app->add_option("--pi1", pi1, "draw group 1 with this probability instead of fixed counts");
  app->add_option("--shift", shift, "translation rule: power ((-k)^g) or signed (-k, +k)")
      ->capture_default_str()
      ->check(CLI::IsMember({"power", "signed"}));
}

HorseshoeConfig finalize(HorseshoeConfig cfg, const std::string& shift, const std::optional<double>& pi1) {
  cfg.shift = shift == "signed" ? ShiftRule::signed_ : ShiftRule::power;
  cfg.pi1 = pi1;
  for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << "\n";
  return cfg;
}

std::vector<ClusterSetting> parse_settings(const std::vector<std::string>& specs) {
  std::vector<ClusterSetting> out;
  for (const auto& spec : specs) {
    ClusterSetting s;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> s.d >> c1 >> s.delta >> c2 >> s.r) || c1 != ':' || c2 != ':' || !in.eof()) {
      throw Error(ErrorCode::invalid_input, "setting '" + spec + "' is not of the form d:delta:r");
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate-density clustering and classification of functional data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Common common;
  app.add_option("--threads", common.threads, "worker threads (0: OpenMP default)")->capture_default_str();
  app.add_flag("--record-timing", common.record_timing, "store wall time in run reports");

  // fpca
  auto* fpca_cmd = app.add_subcommand("fpca", "fit functional PCA and report eigenvalue decay");
  std::string fpca_in, fpca_out = "fpca_model.json", fpca_diag;
  std::size_t fpca_max = 0;
  bool fpca_deriv = false;
  double decay_c = 1.0 / 3.0, decay_tol = 0.05;
  fpca_cmd->add_option("--in", fpca_in, "curves CSV")->required();
  fpca_cmd->add_option("--out", fpca_out, "model JSON")->capture_default_str();
  fpca_cmd->add_option("--max-components", fpca_max, "components kept (0: min(n-1, m))")->capture_default_str();
  fpca_cmd->add_option("--diagnostics", fpca_diag, "write the decay report JSON here");
  fpca_cmd->add_option("--C", decay_c, "exponential-decay constant")->capture_default_str();
  fpca_cmd->add_option("--tail-tol", decay_tol, "tolerance for the tail limit tests")->capture_default_str();
  fpca_cmd->add_flag("--second-derivative", fpca_deriv, "analyse finite-difference second derivatives");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "generate the two-horseshoe functional sample");
  HorseshoeConfig sim_cfg;
  std::string sim_shift = "power", sim_out = "simulated.csv", sim_report;
  std::optional<double> sim_pi1;
  SeedOption sim_seed;
  add_simulation_options(sim_cmd, sim_cfg, sim_shift, sim_pi1);
  sim_cmd->add_option("--seed", sim_seed.value, "random seed (generated and printed when absent)");
  sim_cmd->add_option("--out", sim_out, "curves CSV with a label column")->capture_default_str();
  sim_cmd->add_option("--report", sim_report, "config echo JSON (default: <out>.json)");

  // cluster
  auto* cl_cmd = app.add_subcommand("cluster", "mode-based clustering of a curve sample");
  ClusterConfig cl_cfg;
  std::string cl_in, cl_prefix = "cluster", cl_kernel = "gaussian", cl_rule = "normal-reference";
  bool cl_density = false, cl_regions = false, cl_deriv = false;
  cl_cmd->add_option("--in", cl_in, "curves CSV")->required();
  cl_cmd->add_option("--d", cl_cfg.d, "principal components used")->capture_default_str();
  cl_cmd->add_option("--delta", cl_cfg.delta, "bandwidth scale factor")->capture_default_str();
  cl_cmd->add_option("--r", cl_cfg.r, "mode window half-width in cells")->capture_default_str();
  cl_cmd->add_option("--cells", cl_cfg.cells_per_axis, "grid cells per axis (0: 120 for d <= 3, else 16)")
      ->capture_default_str();
  cl_cmd->add_option("--padding", cl_cfg.padding_bandwidths, "grid padding in bandwidths")->capture_default_str();
  cl_cmd->add_option("--kernel", cl_kernel, "gaussian or epanechnikov")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  cl_cmd->add_option("--bandwidth-rule", cl_rule, "normal-reference or univariate")
      ->capture_default_str()
      ->check(CLI::IsMember({"normal-reference", "univariate"}));
  cl_cmd->add_option("--prefix", cl_prefix, "output prefix")->capture_default_str();
  cl_cmd->add_flag("--density", cl_density, "also write <prefix>_density.csv");
  cl_cmd->add_flag("--regions", cl_regions, "also write <prefix>_regions.csv");
  cl_cmd->add_flag("--second-derivative", cl_deriv, "cluster finite-difference second derivatives");

  // gridsearch
  auto* gs_cmd = app.add_subcommand("gridsearch", "Calinski-Harabasz search over (delta, r)");
  ClusterConfig gs_cfg;
  std::string gs_in, gs_prefix = "gridsearch", gs_kernel = "gaussian";
  std::vector<double> gs_deltas{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::size_t> gs_rs{1, 2, 3, 4, 5, 6, 7};
  bool gs_deriv = false;
  gs_cmd->add_option("--in", gs_in, "curves CSV")->required();
  gs_cmd->add_option("--d", gs_cfg.d, "principal components used")->capture_default_str();
  gs_cmd->add_option("--deltas", gs_deltas, "bandwidth scale grid")->capture_default_str()->delimiter(',');
  gs_cmd->add_option("--rs", gs_rs, "mode window grid")->capture_default_str()->delimiter(',');
  gs_cmd->add_option("--cells", gs_cfg.cells_per_axis, "grid cells per axis (0: automatic)")->capture_default_str();
  gs_cmd->add_option("--padding", gs_cfg.padding_bandwidths, "grid padding in bandwidths")->capture_default_str();
  gs_cmd->add_option("--kernel", gs_kernel, "gaussian or epanechnikov")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  gs_cmd->add_option("--prefix", gs_prefix, "output prefix")->capture_default_str();
  gs_cmd->add_flag("--second-derivative", gs_deriv, "search on finite-difference second derivatives");

  // classify-train
  auto* tr_cmd = app.add_subcommand("classify-train", "train the kernel Bayes classifier");
  std::string tr_in, tr_model = "classifier.json", tr_mode = "heteroscedastic", tr_kernel = "gaussian", tr_report;
  std::size_t tr_d = 3, tr_cv = 0;
  double tr_fraction = 2.0 / 3.0;
  SeedOption tr_seed;
  tr_cmd->add_option("--in", tr_in, "labelled curves CSV")->required();
  tr_cmd->add_option("--d", tr_d, "projection dimension")->capture_default_str();
  tr_cmd->add_option("--mode", tr_mode, "heteroscedastic or homoscedastic")
      ->capture_default_str()
      ->check(CLI::IsMember({"heteroscedastic", "homoscedastic"}));
  tr_cmd->add_option("--kernel", tr_kernel, "gaussian or epanechnikov")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  tr_cmd->add_option("--model", tr_model, "model JSON")->capture_default_str();
  tr_cmd->add_option("--cv-repeats", tr_cv, "random-split repeats to estimate the error (0: none)")
      ->capture_default_str();
  tr_cmd->add_option("--train-fraction", tr_fraction, "training share of each group")->capture_default_str();
  tr_cmd->add_option("--seed", tr_seed.value, "split seed (generated and printed when absent)");
  tr_cmd->add_option("--report", tr_report, "run report JSON (default: <model>.report.json)");

  // classify-predict
  auto* pr_cmd = app.add_subcommand("classify-predict", "label curves with a trained classifier");
  std::string pr_model, pr_in, pr_out = "predictions.csv";
  pr_cmd->add_option("--model", pr_model, "model JSON")->required();
  pr_cmd->add_option("--in", pr_in, "curves CSV")->required();
  pr_cmd->add_option("--out", pr_out, "predictions CSV")->capture_default_str();

  // benchmark
  auto* bm_cmd = app.add_subcommand("benchmark", "Monte Carlo replication on simulated horseshoes");
  HorseshoeConfig bm_cfg;
  std::string bm_shift = "power", bm_kind = "clustering", bm_prefix = "benchmark", bm_kernel = "gaussian",
              bm_mode = "heteroscedastic";
  std::optional<double> bm_pi1;
  SeedOption bm_seed;
  std::vector<std::string> bm_settings{"3:0.6:1", "3:0.6:5", "3:0.6:10", "3:1:1",   "3:1:5",
                                       "3:1:10",  "3:1.4:1", "3:1.4:5", "3:1.4:10"};
  std::size_t bm_reps = 50, bm_cells = 0, bm_kmeans = 0, bm_repeats = 20;
  std::vector<std::size_t> bm_dlist{2, 3, 4, 5};
  double bm_fraction = 2.0 / 3.0;
  bool bm_serial = false;
  add_simulation_options(bm_cmd, bm_cfg, bm_shift, bm_pi1);
  bm_cmd->add_option("--experiment", bm_kind, "clustering or discriminant")
      ->capture_default_str()
      ->check(CLI::IsMember({"clustering", "discriminant"}));
  bm_cmd->add_option("--seed", bm_seed.value, "base seed (generated and printed when absent)");
  bm_cmd->add_option("--prefix", bm_prefix, "output prefix")->capture_default_str();
  bm_cmd->add_option("--settings", bm_settings, "clustering settings d:delta:r")
      ->capture_default_str()
      ->delimiter(',');
  bm_cmd->add_option("--replicates", bm_reps, "clustering replicates")->capture_default_str();
  bm_cmd->add_option("--cells", bm_cells, "grid cells per axis (0: automatic)")->capture_default_str();
  bm_cmd->add_option("--kernel", bm_kernel, "gaussian or epanechnikov")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  bm_cmd->add_option("--kmeans", bm_kmeans, "also run k-means with this k (0: off)")->capture_default_str();
  bm_cmd->add_option("--d-list", bm_dlist, "discriminant projection dimensions")
      ->capture_default_str()
      ->delimiter(',');
  bm_cmd->add_option("--repeats", bm_repeats, "discriminant random-split repeats")->capture_default_str();
  bm_cmd->add_option("--train-fraction", bm_fraction, "discriminant training share")->capture_default_str();
  bm_cmd->add_option("--mode", bm_mode, "heteroscedastic or homoscedastic")
      ->capture_default_str()
      ->check(CLI::IsMember({"heteroscedastic", "homoscedastic"}));
  bm_cmd->add_flag("--serial", bm_serial, "run replicates one after another");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ERROR 1: " << e.what() << "\n";
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (common.threads < 0) throw Error(ErrorCode::invalid_input, "--threads must be non-negative");
    if (common.threads > 0) omp_set_num_threads(common.threads);

    if (fpca_cmd->parsed()) {
      const CurveFile file = read_curves(fpca_in);
      const FunctionalSample sample = maybe_derivative(file.sample, fpca_deriv);
      const FpcaModel model = fit_fpca(sample, fpca_max ? fpca_max : max_components_for(sample));
      json out = to_json(model);
      out["command"] = "fpca";
      out["input"] = fpca_in;
      out["second_derivative"] = fpca_deriv;
      write_text(fpca_out, out.dump(2) + "\n");
      if (!fpca_diag.empty()) {
        json diag = run_report("fpca", common);
        diag["decay"] = to_json(classify_decay(model.eigenvalues, decay_c, decay_tol));
        diag["fev"] = out["fev"];
        finish_report(diag, fpca_diag, common, start);
      }
      for (std::size_t d = 1; d <= std::min<std::size_t>(5, model.components()); ++d) {
        std::cout << "FEV(" << d << ") = " << fev(model, d) << "\n";
      }
    } else if (sim_cmd->parsed()) {
      HorseshoeConfig cfg = finalize(sim_cfg, sim_shift, sim_pi1);
      cfg.seed = sim_seed.resolve();
      const SimulatedData data = generate(cfg);
      write_text(sim_out, curves_csv(data.sample, std::span<const int>(data.labels)));
      json report = run_report("simulate", common);
      report["seed"] = cfg.seed;
      report["rng"] = kRngDescription;
      report["config"] = to_json(cfg);
      report["output"] = sim_out;
      finish_report(report, sim_report.empty() ? sim_out + ".json" : sim_report, common, start);
    } else if (cl_cmd->parsed()) {
      cl_cfg.kernel = parse_kernel(cl_kernel);
      cl_cfg.bandwidth_rule = parse_bandwidth_rule(cl_rule);
      cl_cfg.validate();
      const CurveFile file = read_curves(cl_in);
      const FunctionalSample sample = maybe_derivative(file.sample, cl_deriv);
      const FpcaModel model = fit_fpca(sample, max_components_for(sample));
      if (model.positive_components() < cl_cfg.d) {
        throw Error(ErrorCode::insufficient_spectrum,
                    "FPCA yields " + std::to_string(model.positive_components()) +
                        " positive eigenvalues, clustering needs d = " + std::to_string(cl_cfg.d));
      }
      const ClusterResult result = cluster_scores(model, model.leading_scores(cl_cfg.d), cl_cfg);
      write_text(cl_prefix + "_labels.csv", labels_csv(result));
      write_text(cl_prefix + "_modal.csv", modal_curves_csv(result, sample.grid()));
      if (cl_density) write_text(cl_prefix + "_density.csv", density_csv(result.density));
      if (cl_regions) write_text(cl_prefix + "_regions.csv", regions_csv(result.density, result.regions));
      json report = run_report("cluster", common);
      report["input"] = cl_in;
      report["second_derivative"] = cl_deriv;
      report["config"] = to_json(cl_cfg);
      report["g_hat"] = result.g_hat;
      report["fev"] = json_number(fev(model, cl_cfg.d));
      report["bandwidth"] = {{"h", result.density.bandwidth.h}, {"delta", cl_cfg.delta}};
      report["clusters"] = cluster_summary(result);
      report["ch"] = json_number(calinski_harabasz(result.scores, result.labels));
      if (file.labels) {
        report["purity"] = json_number(purity(result.labels, *file.labels));
        report["misclassification"] = json_number(misclassification(result.labels, *file.labels));
      }
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "g_hat = " << result.g_hat << "\n";
      finish_report(report, cl_prefix + "_report.json", common, start);
    } else if (gs_cmd->parsed()) {
      gs_cfg.kernel = parse_kernel(gs_kernel);
      const CurveFile file = read_curves(gs_in);
      const FunctionalSample sample = maybe_derivative(file.sample, gs_deriv);
      std::optional<std::span<const int>> labels;
      if (file.labels) labels = std::span<const int>(*file.labels);
      const GridSearchResult result = grid_search(sample, gs_cfg, gs_deltas, gs_rs, labels);
      write_text(gs_prefix + ".csv", gridsearch_csv(result));
      json report = run_report("gridsearch", common);
      report["input"] = gs_in;
      report["config"] = to_json(gs_cfg);
      report["result"] = to_json(result);
      std::size_t failed = 0;
      for (const auto& row : result.rows) failed += row.error.empty() ? 0 : 1;
      report["failures"] = failed;
      finish_report(report, gs_prefix + "_report.json", common, start);
      if (result.best) {
        const auto& b = result.rows[*result.best];
        std::cout << "best: delta = " << b.delta << ", r = " << b.r << ", k = " << b.scores.k_used << "\n";
      }
      if (failed) throw Error(ErrorCode::degenerate_scores, std::to_string(failed) + " grid point(s) failed");
    } else if (tr_cmd->parsed()) {
      const CurveFile file = read_curves(tr_in);
      if (!file.labels) throw Error(ErrorCode::missing_group, "training curves need a '# label' column");
      const auto mode = parse_covariance_mode(tr_mode);
      const auto kernel = parse_kernel(tr_kernel);
      const ClassifierModel model = train(file.sample, *file.labels, tr_d, mode, kernel);
      write_text(tr_model, to_json(model).dump() + "\n");
      json report = run_report("classify-train", common);
      report["input"] = tr_in;
      report["config"] = {{"d", tr_d}, {"mode", tr_mode}, {"kernel", tr_kernel}};
      json priors = json::array();
      for (const auto& g : model.groups) priors.push_back(json_number(g.prior));
      report["priors"] = priors;
      if (tr_cv > 0) {
        const std::uint64_t seed = tr_seed.resolve();
        const auto cv = cross_validate(file.sample, *file.labels, tr_d, mode, kernel, tr_cv, tr_fraction, seed);
        report["seed"] = seed;
        report["rng"] = kRngDescription;
        report["cross_validation"] = {{"repeats", tr_cv},
                                      {"train_fraction", tr_fraction},
                                      {"mean_error", json_number(cv.mean)},
                                      {"sd_error", json_number(cv.sd)}};
        std::cout << "cv error = " << cv.mean << " (" << cv.sd << ")\n";
      }
      finish_report(report, tr_report.empty() ? tr_model + ".report.json" : tr_report, common, start);
    } else if (pr_cmd->parsed()) {
      const ClassifierModel model = classifier_from_json(json::parse(read_text(pr_model), nullptr, false));
      const CurveFile file = read_curves(pr_in);
      const auto predictions = predict_all(model, file.sample);
      write_text(pr_out, predictions_csv(predictions));
      std::size_t zero = 0;
      for (const auto& p : predictions) zero += p.zero_evidence ? 1 : 0;
      if (zero) std::cerr << "warning: " << zero << " curve(s) had zero density under every group\n";
      if (file.labels) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < predictions.size(); ++i) wrong += predictions[i].label != (*file.labels)[i];
        std::cout << "error rate = " << static_cast<double>(wrong) / static_cast<double>(predictions.size())
                  << "\n";
      }
    } else if (bm_cmd->parsed()) {
      const HorseshoeConfig cfg = finalize(bm_cfg, bm_shift, bm_pi1);
      const std::uint64_t seed = bm_seed.resolve();
      json report = run_report("benchmark", common);
      report["seed"] = seed;
      report["rng"] = kRngDescription;
      report["data"] = to_json(cfg);
      report["experiment"] = bm_kind;
      std::size_t failures = 0;
      if (bm_kind == "clustering") {
        ClusteringExperiment e;
        e.data = cfg;
        e.settings = parse_settings(bm_settings);
        e.replicates = bm_reps;
        e.base_seed = seed;
        e.cells_per_axis = bm_cells;
        e.kernel = parse_kernel(bm_kernel);
        e.kmeans_k = bm_kmeans;
        e.parallel = !bm_serial;
        const ExperimentReport result = run_clustering_experiment(e);
        report["replicates"] = bm_reps;
        report["cells_per_axis"] = bm_cells;
        report["kernel"] = bm_kernel;
        report["kmeans_k"] = bm_kmeans;
        report["report"] = to_json(result, common.record_timing);
        write_text(bm_prefix + "_replicates.csv", replicates_csv(result, common.record_timing));
        failures = result.failures;
        for (const auto& s : result.summaries) {
          std::cout << s.setting << ": mean error " << s.mean_misclassification << ", median g_hat "
                    << s.q50_g_hat << ", share g_hat = 2 " << s.share_g_hat_2 << "\n";
        }
      } else {
        DiscriminantExperiment e;
        e.data = cfg;
        e.d_list = bm_dlist;
        e.repeats = bm_repeats;
        e.train_fraction = bm_fraction;
        e.base_seed = seed;
        e.mode = parse_covariance_mode(bm_mode);
        e.kernel = parse_kernel(bm_kernel);
        const DiscriminantReport result = run_discriminant_experiment(e);
        report["repeats"] = bm_repeats;
        report["train_fraction"] = bm_fraction;
        report["mode"] = bm_mode;
        report["kernel"] = bm_kernel;
        report["report"] = to_json(result);
        std::string csv = "d,repeat,error\n";
        for (const auto& r : result.per_d) {
          for (std::size_t i = 0; i < r.cv.errors.size(); ++i) {
            csv += std::to_string(r.d) + ',' + std::to_string(i + 1) + ',' + format_double(r.cv.errors[i]) + '\n';
          }
          if (r.error.empty()) std::cout << "d = " << r.d << ": mean error " << r.cv.mean << " (" << r.cv.sd << ")\n";
        }
        write_text(bm_prefix + "_replicates.csv", csv);
        failures = result.failures;
      }
      finish_report(report, bm_prefix + "_report.json", common, start);
      if (failures) {
        throw Error(ErrorCode::degenerate_scores, std::to_string(failures) + " replicate(s) failed");
      }
    }
  } catch (const Error& e) {
    std::cerr << "ERROR " << static_cast<int>(e.kind()) << ": " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ERROR 3: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
