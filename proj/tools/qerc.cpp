// qerc: reproduce the feature-map characterizations and MNIST classification
// experiments from a declarative config, one subcommand per experiment.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qerc/qerc.hpp"

namespace {

using qerc::experiments::ExperimentConfig;

struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> output_dir;
  std::optional<std::string> data_dir;
  std::optional<std::string> cache_dir;
  std::optional<std::string> model_kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> qubits;
  std::optional<double> gT;
  std::optional<double> epsilon;
  std::optional<double> J0T;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<int> n_periods;
  std::optional<std::vector<int>> periods;
  std::optional<std::vector<std::string>> models;
  std::optional<int> realizations;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::vector<int>> window;
  std::optional<int> bins;
  bool include_identity = false;
  std::string compare = "none";  // weights subcommand: none | haar | cauchy
  int threads = 0;
};

void add_options(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file; flags override its fields");
  cmd->add_option("-o,--out", o.output_dir, "output directory");
  cmd->add_option("--data-dir", o.data_dir, "directory with the four MNIST IDX files")
      ->envname("QERC_MNIST_DIR");
  cmd->add_option("--cache-dir", o.cache_dir, "cache directory for encodings and features");
  cmd->add_option("-m,--model", o.model_kind,
                  "model kind: dtc | disordered-dtc | haar | tailed-haar | cauchy");
  cmd->add_option("-s,--seed", o.seed, "model seed (samplers and disorder)");
  cmd->add_option("--train-seed", o.train_seed, "training seed (shuffling)");
  cmd->add_option("-L,--qubits", o.qubits, "qubit count");
  cmd->add_option("--gT", o.gT, "drive rotation angle gT");
  cmd->add_option("--epsilon", o.epsilon, "rotation error epsilon");
  cmd->add_option("--J0T", o.J0T, "coupling scale J0T");
  cmd->add_option("--alpha", o.alpha, "coupling power-law exponent");
  cmd->add_option("--gamma", o.gamma, "Cauchy scale parameter");
  cmd->add_option("-n,--n-periods", o.n_periods, "drive periods for DTC kinds");
  cmd->add_option("--periods", o.periods, "period list")->delimiter(',');
  cmd->add_option("--models", o.models, "table model subset")->delimiter(',');
  cmd->add_option("-r,--realizations", o.realizations, "ensemble realizations");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--batch-size", o.batch_size, "SGD batch size");
  cmd->add_option("--lr", o.learning_rate, "SGD learning rate");
  cmd->add_option("--window", o.window, "statistics window, e.g. 250,300")->delimiter(',');
  cmd->add_option("--bins", o.bins, "histogram bins");
  cmd->add_flag("--include-identity", o.include_identity,
                "include the identity coefficient in z histograms");
  cmd->add_option("-t,--threads", o.threads, "worker threads (0 = hardware)");
}

ExperimentConfig build_config(const CliOverrides& o, const std::string& experiment) {
  ExperimentConfig cfg;
  if (o.config_path) cfg = qerc::experiments::load_config(*o.config_path);
  cfg.experiment = experiment;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.data_dir) cfg.data = qerc::experiments::DataPaths::from_dir(*o.data_dir);
  if (o.cache_dir) cfg.cache_dir = *o.cache_dir;
  if (o.model_kind) cfg.model.kind = qerc::experiments::parse_kind(*o.model_kind);
  if (o.seed) cfg.model.seed.value = *o.seed;
  if (o.train_seed) cfg.train.seed.value = *o.train_seed;
  if (o.qubits) cfg.model.dtc.L = *o.qubits;
  if (o.gT) cfg.model.dtc.gT = *o.gT;
  if (o.epsilon) cfg.model.dtc.epsilon = *o.epsilon;
  if (o.J0T) cfg.model.dtc.J0T = *o.J0T;
  if (o.alpha) cfg.model.dtc.alpha = *o.alpha;
  if (o.gamma) cfg.model.gamma = *o.gamma;
  if (o.n_periods) cfg.model.n_periods = *o.n_periods;
  if (o.periods) cfg.periods = *o.periods;
  if (o.models) cfg.models = *o.models;
  if (o.realizations) cfg.realizations = *o.realizations;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.batch_size) cfg.train.batch_size = *o.batch_size;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.window) {
    if (o.window->size() != 2) throw qerc::ConfigError("--window needs two values");
    cfg.train.window = {(*o.window)[0], (*o.window)[1]};
  }
  if (o.bins) cfg.histogram_bins = *o.bins;
  if (o.include_identity) cfg.include_identity_coefficient = true;
  return cfg;
}

void set_threads(int threads) {
  const int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  Eigen::setNbThreads(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum extreme reservoir computation laboratory"};
  app.require_subcommand(1);

  CliOverrides o;
  auto* weights = app.add_subcommand(
      "weights", "weight distributions of the DTC feature map across drive periods");
  weights->add_option("--compare", o.compare,
                      "compare a random model against the DTC reference: haar | cauchy");
  auto* table = app.add_subcommand("table", "accuracy table across the feature-map models");
  auto* sweep = app.add_subcommand("sweep", "accuracy against the DTC drive period");
  auto* ensemble = app.add_subcommand("ensemble", "realization-averaged accuracies");
  auto* train = app.add_subcommand("train", "single model end to end");
  for (CLI::App* cmd : {weights, table, sweep, ensemble, train}) add_options(cmd, o);

  CLI11_PARSE(app, argc, argv);
  set_threads(o.threads);

  try {
    std::string experiment;
    if (weights->parsed())
      experiment = o.compare == "haar"     ? "haar-compare"
                   : o.compare == "cauchy" ? "cauchy-compare"
                                           : "weights";
    else if (table->parsed())
      experiment = "model-table";
    else if (sweep->parsed())
      experiment = "accuracy-vs-period";
    else if (ensemble->parsed())
      experiment = "ensemble";
    else
      experiment = "train";

    const ExperimentConfig cfg = build_config(o, experiment);
    const auto summary = qerc::experiments::run_experiment(cfg);
    std::printf("%s: wrote %s\n", cfg.experiment.c_str(), cfg.output_dir.c_str());
    if (summary.contains("rows"))
      for (const auto& row : summary.at("rows")) std::printf("  %s\n", row.dump().c_str());
    if (summary.contains("aggregate"))
      std::printf("  aggregate %s\n", summary.at("aggregate").dump().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
