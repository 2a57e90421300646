#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qerc/config.hpp"
#include "qerc/dataset.hpp"
#include "qerc/io.hpp"
#include "qerc/netweights.hpp"
#include "qerc/pipeline.hpp"
#include "qerc/reservoir.hpp"

namespace qerc::experiments {

using netweights::Component;
using netweights::WeightHistogram;
using netweights::WeightSet;
using pipeline::AccuracyReport;
using pipeline::TrainHistory;
using reservoir::FeatureMapKind;
using reservoir::FeatureMapSpec;

inline constexpr const char* kSchurBackend =
#ifdef QERC_USE_LAPACKE
    "lapacke";
#else
    "eigen";
#endif

namespace detail {

inline double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace detail

/// A realized feature map together with its weight coefficients. Every model
/// is analyzed through G = i log(U) except the tailed-Haar model, whose
/// injected tail pushes the generator outside the principal strip; it is
/// analyzed through the generator it was constructed from.
inline std::pair<linalg::UnitaryMatrix, WeightSet> model_with_weights(
    const FeatureMapSpec& spec) {
  spec.validate();
  if (spec.kind == FeatureMapKind::TailedHaar) {
    auto tailed = reservoir::tailed_haar_unitary(static_cast<int>(spec.dim()), spec.seed);
    WeightSet w = netweights::decompose(tailed.generator);
    return {std::move(tailed.unitary), std::move(w)};
  }
  linalg::UnitaryMatrix u = reservoir::build_feature_map(spec);
  WeightSet w = netweights::decompose(linalg::principal_log_unitary(u));
  return {std::move(u), std::move(w)};
}

inline WeightSet model_weights(const FeatureMapSpec& spec) {
  return model_with_weights(spec).second;
}

/// Histograms of the three components of a weight set.
struct ComponentHistograms {
  WeightHistogram x, y, z;
  std::vector<double> x_values, y_values, z_values;
};

inline ComponentHistograms component_histograms(const WeightSet& w, int bins,
                                                bool include_identity) {
  ComponentHistograms h;
  h.x_values = w.a;
  h.y_values = w.b;
  h.z_values = netweights::z_component(w, include_identity);
  h.x = netweights::histogram(h.x_values, bins, Component::x);
  h.y = netweights::histogram(h.y_values, bins, Component::y);
  h.z = netweights::histogram(h.z_values, bins, Component::z);
  return h;
}

inline void write_histogram_csv(const fs::path& path, const WeightHistogram& h) {
  io::CsvWriter csv({"bin_center", "count", "density"});
  if (h.is_spike) {
    csv.row(h.spike_value, h.total, "");
  } else {
    for (std::size_t i = 0; i < h.bins(); ++i)
      csv.row(h.bin_center(i), h.counts[i], h.density[i]);
  }
  csv.save(path);
}

/// Fit, spread and tail summary of one component. The tail threshold uses
/// the fitted sigma when the fit converged, else the sample sigma.
inline json component_summary(const WeightHistogram& h, const std::vector<double>& values) {
  json j;
  j["component"] = netweights::component_name(h.component);
  j["count"] = h.total;
  const double sample_sigma = detail::sample_std(values);
  j["sample_sigma"] = sample_sigma;
  double sigma_ref = sample_sigma;
  try {
    const auto fit = netweights::gaussian_fit(h);
    j["mu"] = fit.mu;
    j["sigma"] = fit.sigma;
    j["residual"] = fit.residual;
    sigma_ref = fit.sigma;
  } catch (const Error& e) {
    j["fit_error"] = e.what();
  }
  if (sigma_ref > 0.0) {
    const auto tail = netweights::tail_metrics(values, sigma_ref);
    j["tail"] = {{"sigma_ref", sigma_ref},
                 {"max_abs", tail.max_abs},
                 {"count_beyond_5sigma", tail.count_beyond_5sigma},
                 {"fraction_beyond_5sigma", tail.fraction_beyond_5sigma}};
  }
  return j;
}

inline json base_manifest(const ExperimentConfig& cfg) {
  json m;
  m["generator"] = std::string("qerc ") + kVersion;
  m["experiment"] = cfg.experiment;
  m["config"] = config_to_json(cfg);
  m["encoding"] = kEncodingConvention;
  m["schur_backend"] = kSchurBackend;
  m["threads"] = Eigen::nbThreads();
  return m;
}

inline void write_manifest(const ExperimentConfig& cfg, json extra = json::object()) {
  json m = base_manifest(cfg);
  m.update(extra);
  io::atomic_write(fs::path(cfg.output_dir) / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// dataset preparation (PCA + encoding, content-addressed cache)

struct PreparedData {
  dataset::EncodedDataset data;
  json manifest;  // data hashes and PCA fragment for run manifests
};

inline PreparedData prepare_dataset(const ExperimentConfig& cfg) {
  if (!cfg.data.complete())
    throw ConfigError("experiment '" + cfg.experiment +
                      "' needs MNIST paths (config data.dir or QERC_MNIST_DIR)");
  if (!cfg.data.all_exist())
    throw ConfigError("MNIST files not found under the configured paths (looked for " +
                      cfg.data.train_images + " etc.)");
  const int L = cfg.model.qubits();

  json data_hashes = {{"train_images", io::hex64(io::hash_file(cfg.data.train_images))},
                      {"train_labels", io::hex64(io::hash_file(cfg.data.train_labels))},
                      {"test_images", io::hex64(io::hash_file(cfg.data.test_images))},
                      {"test_labels", io::hex64(io::hash_file(cfg.data.test_labels))}};
  const std::string cache_key =
      io::hex64(io::fnv1a64(data_hashes.dump() + "|L=" + std::to_string(L) + "|" +
                            kEncodingConvention + "|angles-v1"));

  PreparedData out;
  out.manifest["data_hashes"] = data_hashes;
  out.manifest["dataset_cache_key"] = cache_key;
  out.data.L = L;

  const fs::path cache_base =
      cfg.cache_dir.empty() ? fs::path() : fs::path(cfg.cache_dir) / ("angles_" + cache_key);
  if (!cfg.cache_dir.empty()) {
    const fs::path meta = cache_base.string() + "_meta.json";
    if (fs::exists(meta)) {
      out.data.train_angles = io::load_matrix(cache_base.string() + "_train_angles.bin");
      out.data.test_angles = io::load_matrix(cache_base.string() + "_test_angles.bin");
      const Eigen::MatrixXd ytr = io::load_matrix(cache_base.string() + "_train_labels.bin");
      const Eigen::MatrixXd yte = io::load_matrix(cache_base.string() + "_test_labels.bin");
      out.data.train_labels.resize(static_cast<std::size_t>(ytr.rows()));
      for (Eigen::Index i = 0; i < ytr.rows(); ++i)
        out.data.train_labels[static_cast<std::size_t>(i)] = static_cast<int>(ytr(i, 0));
      out.data.test_labels.resize(static_cast<std::size_t>(yte.rows()));
      for (Eigen::Index i = 0; i < yte.rows(); ++i)
        out.data.test_labels[static_cast<std::size_t>(i)] = static_cast<int>(yte(i, 0));
      std::ifstream in(meta);
      json mj;
      in >> mj;
      out.manifest["pca"] = mj;
      out.manifest["dataset_cache_hit"] = true;
      return out;
    }
  }

  const dataset::MnistSet train =
      dataset::load_mnist(cfg.data.train_images, cfg.data.train_labels, "train");
  const dataset::MnistSet test =
      dataset::load_mnist(cfg.data.test_images, cfg.data.test_labels, "test");
  const dataset::PcaModel pca = dataset::fit_pca(train, 2 * L);
  out.data = dataset::encode_dataset(train, test, pca, L);

  json pca_json;
  pca_json["k"] = 2 * L;
  pca_json["components_hash"] = io::hex64(io::fnv1a64(
      pca.components.data(), sizeof(double) * static_cast<std::size_t>(pca.components.size())));
  pca_json["feature_min"] = std::vector<double>(pca.feature_min.data(),
                                                pca.feature_min.data() + pca.feature_min.size());
  pca_json["feature_max"] = std::vector<double>(pca.feature_max.data(),
                                                pca.feature_max.data() + pca.feature_max.size());
  pca_json["explained_eigenvalues"] = std::vector<double>(
      pca.eigenvalues.data(), pca.eigenvalues.data() + pca.eigenvalues.size());
  out.manifest["pca"] = pca_json;
  out.manifest["dataset_cache_hit"] = false;

  if (!cfg.cache_dir.empty()) {
    io::save_matrix(cache_base.string() + "_train_angles.bin", out.data.train_angles);
    io::save_matrix(cache_base.string() + "_test_angles.bin", out.data.test_angles);
    Eigen::MatrixXd ytr(out.data.train_labels.size(), 1), yte(out.data.test_labels.size(), 1);
    for (std::size_t i = 0; i < out.data.train_labels.size(); ++i)
      ytr(static_cast<Eigen::Index>(i), 0) = out.data.train_labels[i];
    for (std::size_t i = 0; i < out.data.test_labels.size(); ++i)
      yte(static_cast<Eigen::Index>(i), 0) = out.data.test_labels[i];
    io::save_matrix(cache_base.string() + "_train_labels.bin", ytr);
    io::save_matrix(cache_base.string() + "_test_labels.bin", yte);
    io::atomic_write(cache_base.string() + "_meta.json", pca_json.dump(2) + "\n");
  }
  return out;
}

/// Feature matrices for one model, cached by content when a cache dir is set
/// (the reservoir application is the expensive sweep step).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> model_features(
    const ExperimentConfig& cfg, const FeatureMapSpec& spec, const PreparedData& prepared,
    const linalg::UnitaryMatrix& u) {
  std::string key;
  if (!cfg.cache_dir.empty()) {
    key = io::hex64(io::fnv1a64(prepared.manifest.at("dataset_cache_key").get<std::string>() +
                                "|" + model_to_json(spec).dump() + "|features-v1"));
    const fs::path base = fs::path(cfg.cache_dir) / ("features_" + key);
    if (fs::exists(base.string() + "_train.bin") && fs::exists(base.string() + "_test.bin"))
      return {io::load_matrix(base.string() + "_train.bin"),
              io::load_matrix(base.string() + "_test.bin")};
  }
  Eigen::MatrixXd train = pipeline::feature_matrix(u, prepared.data.train_angles);
  Eigen::MatrixXd test = pipeline::feature_matrix(u, prepared.data.test_angles);
  if (!cfg.cache_dir.empty()) {
    const fs::path base = fs::path(cfg.cache_dir) / ("features_" + key);
    io::save_matrix(base.string() + "_train.bin", train);
    io::save_matrix(base.string() + "_test.bin", test);
  }
  return {std::move(train), std::move(test)};
}

inline void write_history_csv(const fs::path& path, const TrainHistory& h) {
  io::CsvWriter csv({"epoch", "train_acc", "test_acc"});
  for (std::size_t e = 0; e < h.train_accuracy.size(); ++e)
    csv.row(e + 1, h.train_accuracy[e], h.test_accuracy[e]);
  csv.save(path);
}

inline json report_to_json(const AccuracyReport& r) {
  return {{"test_mean", r.test_mean},   {"test_std", r.test_std},
          {"train_mean", r.train_mean}, {"train_std", r.train_std},
          {"delta_acc", r.delta_acc}};
}

// ---------------------------------------------------------------------------
// experiment: weights (Fig. 2 data)

/// Weight distributions of the DTC feature map across drive periods, with
/// fits, tails and distances to the longest-period histogram.
inline json run_weights(const ExperimentConfig& cfg) {
  if (cfg.model.kind != FeatureMapKind::Dtc && cfg.model.kind != FeatureMapKind::DisorderedDtc)
    throw ConfigError("weights experiment needs a DTC-kind model");
  std::vector<int> periods = cfg.periods.empty() ? std::vector<int>{2, 10, 50, 100} : cfg.periods;
  std::sort(periods.begin(), periods.end());
  if (periods.front() < 1) throw ConfigError("periods must be positive");

  reservoir::DtcParams params = cfg.model.dtc;
  if (cfg.model.kind == FeatureMapKind::DisorderedDtc && params.disorderT.empty())
    params.disorderT = reservoir::sample_disorder(params.L, cfg.model.seed);
  const linalg::UnitaryMatrix f = reservoir::floquet_operator(params);

  const std::string kind = reservoir::kind_name(cfg.model.kind);
  const fs::path out(cfg.output_dir);
  json summary;
  summary["kind"] = kind;
  summary["periods"] = periods;
  summary["reference_period"] = periods.back();

  std::map<int, ComponentHistograms> hists;
  linalg::UnitaryMatrix u = linalg::matrix_power(f, periods.front());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (i > 0) {
      const int delta = periods[i] - periods[i - 1];
      u = delta > 0 ? linalg::UnitaryMatrix(
                          (linalg::matrix_power(f, delta).mat() * u.mat()).eval(), 1e-9)
                    : u;
    }
    const WeightSet w = netweights::decompose(linalg::principal_log_unitary(u));
    hists.emplace(periods[i],
                  component_histograms(w, cfg.histogram_bins, cfg.include_identity_coefficient));
  }

  const ComponentHistograms& ref = hists.at(periods.back());
  for (const auto& [n, h] : hists) {
    const std::string tag = kind + "_n" + std::to_string(n);
    write_histogram_csv(out / ("hist_" + tag + "_x.csv"), h.x);
    write_histogram_csv(out / ("hist_" + tag + "_y.csv"), h.y);
    write_histogram_csv(out / ("hist_" + tag + "_z.csv"), h.z);
    json per;
    per["x"] = component_summary(h.x, h.x_values);
    per["y"] = component_summary(h.y, h.y_values);
    per["z"] = component_summary(h.z, h.z_values);
    per["x"]["distance_to_reference"] = netweights::histogram_distance(h.x, ref.x);
    per["y"]["distance_to_reference"] = netweights::histogram_distance(h.y, ref.y);
    per["z"]["distance_to_reference"] = netweights::histogram_distance(h.z, ref.z);
    summary["per_period"][std::to_string(n)] = per;
  }
  io::atomic_write(out / "summary.json", summary.dump(2) + "\n");
  write_manifest(cfg);
  return summary;
}

// ---------------------------------------------------------------------------
// experiment: haar-compare / cauchy-compare (Fig. 3 data)

/// Weight distributions of a random model against the DTC reference at the
/// same dimension.
inline json run_compare(const ExperimentConfig& cfg, FeatureMapKind compare_kind) {
  if (compare_kind != FeatureMapKind::Haar && compare_kind != FeatureMapKind::Cauchy)
    throw ConfigError("compare experiment supports haar and cauchy");

  FeatureMapSpec dtc_spec = cfg.model;
  if (dtc_spec.kind != FeatureMapKind::Dtc && dtc_spec.kind != FeatureMapKind::DisorderedDtc)
    dtc_spec.kind = FeatureMapKind::Dtc;
  FeatureMapSpec random_spec = cfg.model;
  random_spec.kind = compare_kind;

  const ComponentHistograms random_h = component_histograms(
      model_weights(random_spec), cfg.histogram_bins, cfg.include_identity_coefficient);
  const ComponentHistograms dtc_h = component_histograms(
      model_weights(dtc_spec), cfg.histogram_bins, cfg.include_identity_coefficient);

  const fs::path out(cfg.output_dir);
  const std::string rname = reservoir::kind_name(compare_kind);
  const std::string dname =
      std::string(reservoir::kind_name(dtc_spec.kind)) + "_n" + std::to_string(dtc_spec.n_periods);
  write_histogram_csv(out / ("hist_" + rname + "_x.csv"), random_h.x);
  write_histogram_csv(out / ("hist_" + rname + "_y.csv"), random_h.y);
  write_histogram_csv(out / ("hist_" + rname + "_z.csv"), random_h.z);
  write_histogram_csv(out / ("hist_" + dname + "_x.csv"), dtc_h.x);
  write_histogram_csv(out / ("hist_" + dname + "_y.csv"), dtc_h.y);
  write_histogram_csv(out / ("hist_" + dname + "_z.csv"), dtc_h.z);

  json summary;
  summary["model"] = rname;
  summary["reference"] = dname;
  summary[rname]["x"] = component_summary(random_h.x, random_h.x_values);
  summary[rname]["y"] = component_summary(random_h.y, random_h.y_values);
  summary[rname]["z"] = component_summary(random_h.z, random_h.z_values);
  summary[dname]["x"] = component_summary(dtc_h.x, dtc_h.x_values);
  summary[dname]["y"] = component_summary(dtc_h.y, dtc_h.y_values);
  summary[dname]["z"] = component_summary(dtc_h.z, dtc_h.z_values);
  summary["distance"] = {{"x", netweights::histogram_distance(random_h.x, dtc_h.x)},
                         {"y", netweights::histogram_distance(random_h.y, dtc_h.y)},
                         {"z", netweights::histogram_distance(random_h.z, dtc_h.z)}};
  io::atomic_write(out / "summary.json", summary.dump(2) + "\n");
  write_manifest(cfg);
  return summary;
}

// ---------------------------------------------------------------------------
// experiment: model table (Table 1)

inline FeatureMapSpec table_model_spec(const std::string& name, const FeatureMapSpec& base) {
  FeatureMapSpec spec = base;
  spec.kind = parse_kind(name);
  return spec;
}

inline const std::vector<std::string>& default_table_models() {
  static const std::vector<std::string> models{"haar", "tailed-haar", "cauchy", "dtc",
                                               "disordered-dtc"};
  return models;
}

/// Trains the QERC classifier for each requested model with one seed each and
/// tabulates the epoch-window accuracies.
inline json run_model_table(const ExperimentConfig& cfg) {
  const std::vector<std::string>& models = cfg.models.empty() ? default_table_models() : cfg.models;
  const PreparedData prepared = prepare_dataset(cfg);
  const fs::path out(cfg.output_dir);

  json table = json::array();
  io::CsvWriter csv({"model", "test_mean", "test_std", "train_mean", "train_std", "delta_acc"});
  for (const std::string& name : models) {
    const FeatureMapSpec spec = table_model_spec(name, cfg.model);
    const linalg::UnitaryMatrix u = reservoir::build_feature_map(spec);
    const auto [train_f, test_f] = model_features(cfg, spec, prepared, u);
    const TrainHistory h = pipeline::train_onn(train_f, prepared.data.train_labels, test_f,
                                               prepared.data.test_labels, cfg.train);
    write_history_csv(out / ("history_" + name + ".csv"), h);
    const AccuracyReport r = pipeline::accuracy_report(h, cfg.train.window);
    json row = report_to_json(r);
    row["model"] = name;
    table.push_back(row);
    csv.row(name, r.test_mean, r.test_std, r.train_mean, r.train_std, r.delta_acc);
  }
  csv.save(out / "table.csv");
  json summary;
  summary["rows"] = table;
  io::atomic_write(out / "table.json", summary.dump(2) + "\n");
  write_manifest(cfg, {{"dataset", prepared.manifest}});
  return summary;
}

// ---------------------------------------------------------------------------
// experiment: accuracy vs period (Fig. 4)

inline json run_accuracy_vs_period(const ExperimentConfig& cfg) {
  if (cfg.model.kind != FeatureMapKind::Dtc && cfg.model.kind != FeatureMapKind::DisorderedDtc)
    throw ConfigError("sweep experiment needs a DTC-kind model");
  std::vector<int> periods =
      cfg.periods.empty() ? std::vector<int>{2, 5, 10, 20, 50, 100} : cfg.periods;
  std::sort(periods.begin(), periods.end());
  if (periods.front() < 1) throw ConfigError("periods must be positive");

  const PreparedData prepared = prepare_dataset(cfg);
  reservoir::DtcParams params = cfg.model.dtc;
  if (cfg.model.kind == FeatureMapKind::DisorderedDtc && params.disorderT.empty())
    params.disorderT = reservoir::sample_disorder(params.L, cfg.model.seed);
  const linalg::UnitaryMatrix f = reservoir::floquet_operator(params);

  const fs::path out(cfg.output_dir);
  json rows = json::array();
  io::CsvWriter csv({"n", "train_mean", "train_std", "test_mean", "test_std"});
  linalg::UnitaryMatrix u = linalg::matrix_power(f, periods.front());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (i > 0)
      u = linalg::UnitaryMatrix(
          (linalg::matrix_power(f, periods[i] - periods[i - 1]).mat() * u.mat()).eval(), 1e-9);
    FeatureMapSpec spec = cfg.model;
    spec.n_periods = periods[i];
    const auto [train_f, test_f] = model_features(cfg, spec, prepared, u);
    const TrainHistory h = pipeline::train_onn(train_f, prepared.data.train_labels, test_f,
                                               prepared.data.test_labels, cfg.train);
    write_history_csv(out / ("history_n" + std::to_string(periods[i]) + ".csv"), h);
    const AccuracyReport r = pipeline::accuracy_report(h, cfg.train.window);
    json row = report_to_json(r);
    row["n"] = periods[i];
    rows.push_back(row);
    csv.row(periods[i], r.train_mean, r.train_std, r.test_mean, r.test_std);
  }
  csv.save(out / "sweep.csv");
  json summary;
  summary["rows"] = rows;
  io::atomic_write(out / "sweep.json", summary.dump(2) + "\n");
  write_manifest(cfg, {{"dataset", prepared.manifest}});
  return summary;
}

// ---------------------------------------------------------------------------
// experiment: ensemble (Table 2 / Fig. 5)

/// Repeats the pipeline across realizations of a random model (model seed and
/// training seed offset by the realization index), writing per-realization
/// weight histograms and the realization-averaged report. Aggregates match
/// pipeline::ensemble_report.
inline json run_ensemble(const ExperimentConfig& cfg) {
  if (!reservoir::is_random_kind(cfg.model.kind))
    throw ConfigError("ensemble experiment needs a model with a random element");
  if (cfg.realizations < 1) throw ConfigError("realizations must be >= 1");
  const PreparedData prepared = prepare_dataset(cfg);
  const fs::path out(cfg.output_dir);
  const std::string kind = reservoir::kind_name(cfg.model.kind);

  json realizations = json::array();
  std::vector<double> test_means, train_means;
  for (int r = 1; r <= cfg.realizations; ++r) {
    FeatureMapSpec spec = cfg.model;
    spec.seed = cfg.model.seed.offset(static_cast<std::uint64_t>(r));
    pipeline::TrainConfig train_cfg = cfg.train;
    train_cfg.seed = cfg.train.seed.offset(static_cast<std::uint64_t>(r));

    const auto [u, weights] = model_with_weights(spec);
    const ComponentHistograms h =
        component_histograms(weights, cfg.histogram_bins, cfg.include_identity_coefficient);
    const std::string tag = kind + "_r" + std::to_string(r);
    write_histogram_csv(out / ("hist_" + tag + "_x.csv"), h.x);
    write_histogram_csv(out / ("hist_" + tag + "_y.csv"), h.y);
    write_histogram_csv(out / ("hist_" + tag + "_z.csv"), h.z);

    const auto [train_f, test_f] = model_features(cfg, spec, prepared, u);
    const TrainHistory history = pipeline::train_onn(train_f, prepared.data.train_labels, test_f,
                                                     prepared.data.test_labels, train_cfg);
    write_history_csv(out / ("history_" + tag + ".csv"), history);
    const AccuracyReport report = pipeline::accuracy_report(history, cfg.train.window);
    json row = report_to_json(report);
    row["realization"] = r;
    row["model_seed"] = spec.seed.value;
    row["train_seed"] = train_cfg.seed.value;
    row["weights"] = {{"x", component_summary(h.x, h.x_values)},
                      {"y", component_summary(h.y, h.y_values)},
                      {"z", component_summary(h.z, h.z_values)}};
    realizations.push_back(row);
    test_means.push_back(report.test_mean);
    train_means.push_back(report.train_mean);
  }

  AccuracyReport agg;
  agg.test_mean = 0.0;
  for (double v : test_means) agg.test_mean += v;
  agg.test_mean /= static_cast<double>(test_means.size());
  agg.test_std = detail::sample_std(test_means);
  agg.train_mean = 0.0;
  for (double v : train_means) agg.train_mean += v;
  agg.train_mean /= static_cast<double>(train_means.size());
  agg.train_std = detail::sample_std(train_means);
  agg.delta_acc = agg.train_mean - agg.test_mean;

  json summary;
  summary["model"] = kind;
  summary["realizations"] = realizations;
  summary["aggregate"] = report_to_json(agg);
  io::atomic_write(out / "ensemble.json", summary.dump(2) + "\n");
  write_manifest(cfg, {{"dataset", prepared.manifest}});
  return summary;
}

// ---------------------------------------------------------------------------
// experiment: train (single model end to end)

inline json run_train(const ExperimentConfig& cfg) {
  const PreparedData prepared = prepare_dataset(cfg);
  const fs::path out(cfg.output_dir);
  const linalg::UnitaryMatrix u = reservoir::build_feature_map(cfg.model);
  const auto [train_f, test_f] = model_features(cfg, cfg.model, prepared, u);
  const TrainHistory h = pipeline::train_onn(train_f, prepared.data.train_labels, test_f,
                                             prepared.data.test_labels, cfg.train);
  write_history_csv(out / "history.csv", h);
  const AccuracyReport r = pipeline::accuracy_report(h, cfg.train.window);
  json summary;
  summary["model"] = reservoir::kind_name(cfg.model.kind);
  summary["report"] = report_to_json(r);
  io::atomic_write(out / "report.json", summary.dump(2) + "\n");
  write_manifest(cfg, {{"dataset", prepared.manifest}});
  return summary;
}

/// Dispatches on cfg.experiment.
inline json run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "weights") return run_weights(cfg);
  if (cfg.experiment == "haar-compare") return run_compare(cfg, FeatureMapKind::Haar);
  if (cfg.experiment == "cauchy-compare") return run_compare(cfg, FeatureMapKind::Cauchy);
  if (cfg.experiment == "model-table") return run_model_table(cfg);
  if (cfg.experiment == "accuracy-vs-period") return run_accuracy_vs_period(cfg);
  if (cfg.experiment == "ensemble") return run_ensemble(cfg);
  if (cfg.experiment == "train") return run_train(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace qerc::experiments
