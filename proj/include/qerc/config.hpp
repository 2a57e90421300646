#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qerc/errors.hpp"
#include "qerc/pipeline.hpp"
#include "qerc/reservoir.hpp"

namespace qerc::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Encoding convention recorded in every manifest; changing any stage of the
/// encoder must change this string.
inline constexpr const char* kEncodingConvention =
    "pixels/255|pca(2L,mean-centered,desc-eigen,sign:max-coord-positive)|minmax[train,clip]|"
    "theta=pi*u[even],phi=2pi*u[odd]|qubit1=msb";

struct DataPaths {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;

  static DataPaths from_dir(const std::string& dir) {
    const fs::path d(dir);
    return {(d / "train-images-idx3-ubyte").string(), (d / "train-labels-idx1-ubyte").string(),
            (d / "t10k-images-idx3-ubyte").string(), (d / "t10k-labels-idx1-ubyte").string()};
  }

  bool complete() const {
    return !train_images.empty() && !train_labels.empty() && !test_images.empty() &&
           !test_labels.empty();
  }

  bool all_exist() const {
    return complete() && fs::exists(train_images) && fs::exists(train_labels) &&
           fs::exists(test_images) && fs::exists(test_labels);
  }
};

struct ExperimentConfig {
  std::string experiment = "weights";
  reservoir::FeatureMapSpec model{};
  pipeline::TrainConfig train{};
  DataPaths data{};
  std::string output_dir = "out";
  std::vector<int> periods;  // empty: per-experiment default
  int realizations = 10;
  std::vector<std::string> models;  // table subset; empty: all five
  std::string cache_dir;
  int histogram_bins = 100;
  bool include_identity_coefficient = false;
};

inline reservoir::FeatureMapKind parse_kind(const std::string& name) {
  using reservoir::FeatureMapKind;
  if (name == "dtc") return FeatureMapKind::Dtc;
  if (name == "disordered-dtc") return FeatureMapKind::DisorderedDtc;
  if (name == "haar") return FeatureMapKind::Haar;
  if (name == "tailed-haar") return FeatureMapKind::TailedHaar;
  if (name == "cauchy") return FeatureMapKind::Cauchy;
  throw ConfigError("unknown model kind '" + name + "'");
}

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace detail

inline json model_to_json(const reservoir::FeatureMapSpec& m) {
  json j;
  j["kind"] = reservoir::kind_name(m.kind);
  j["L"] = m.dtc.L;
  j["gT"] = m.dtc.gT;
  j["epsilon"] = m.dtc.epsilon;
  j["J0T"] = m.dtc.J0T;
  j["alpha"] = m.dtc.alpha;
  if (!m.dtc.disorderT.empty()) j["disorderT"] = m.dtc.disorderT;
  j["n_periods"] = m.n_periods;
  j["gamma"] = m.gamma;
  j["seed"] = m.seed.value;
  return j;
}

inline reservoir::FeatureMapSpec model_from_json(const json& j) {
  detail::check_keys(
      j, {"kind", "L", "gT", "epsilon", "J0T", "alpha", "disorderT", "n_periods", "gamma", "seed"},
      "model");
  reservoir::FeatureMapSpec m;
  if (j.contains("kind")) m.kind = parse_kind(j.at("kind").get<std::string>());
  if (j.contains("L")) m.dtc.L = j.at("L").get<int>();
  if (j.contains("gT")) m.dtc.gT = j.at("gT").get<double>();
  if (j.contains("epsilon")) m.dtc.epsilon = j.at("epsilon").get<double>();
  if (j.contains("J0T")) m.dtc.J0T = j.at("J0T").get<double>();
  if (j.contains("alpha")) m.dtc.alpha = j.at("alpha").get<double>();
  if (j.contains("disorderT")) m.dtc.disorderT = j.at("disorderT").get<std::vector<double>>();
  if (j.contains("n_periods")) m.n_periods = j.at("n_periods").get<int>();
  if (j.contains("gamma")) m.gamma = j.at("gamma").get<double>();
  if (j.contains("seed")) m.seed.value = j.at("seed").get<std::uint64_t>();
  return m;
}

inline json train_to_json(const pipeline::TrainConfig& t) {
  json j;
  j["epochs"] = t.epochs;
  j["batch_size"] = t.batch_size;
  j["learning_rate"] = t.learning_rate;
  j["seed"] = t.seed.value;
  j["window"] = {t.window.first, t.window.last};
  return j;
}

inline pipeline::TrainConfig train_from_json(const json& j) {
  detail::check_keys(j, {"epochs", "batch_size", "learning_rate", "seed", "window"}, "train");
  pipeline::TrainConfig t;
  if (j.contains("epochs")) t.epochs = j.at("epochs").get<int>();
  if (j.contains("batch_size")) t.batch_size = j.at("batch_size").get<int>();
  if (j.contains("learning_rate")) t.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("seed")) t.seed.value = j.at("seed").get<std::uint64_t>();
  if (j.contains("window")) {
    const auto w = j.at("window").get<std::vector<int>>();
    if (w.size() != 2) throw ConfigError("train.window must be [first, last]");
    t.window = {w[0], w[1]};
  }
  return t;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["model"] = model_to_json(c.model);
  j["train"] = train_to_json(c.train);
  if (c.data.complete()) {
    j["data"] = {{"train_images", c.data.train_images},
                 {"train_labels", c.data.train_labels},
                 {"test_images", c.data.test_images},
                 {"test_labels", c.data.test_labels}};
  }
  j["output_dir"] = c.output_dir;
  if (!c.periods.empty()) j["periods"] = c.periods;
  j["realizations"] = c.realizations;
  if (!c.models.empty()) j["models"] = c.models;
  if (!c.cache_dir.empty()) j["cache_dir"] = c.cache_dir;
  j["histogram_bins"] = c.histogram_bins;
  j["include_identity_coefficient"] = c.include_identity_coefficient;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  detail::check_keys(j,
                     {"experiment", "model", "train", "data", "output_dir", "periods",
                      "realizations", "models", "cache_dir", "histogram_bins",
                      "include_identity_coefficient"},
                     "config");
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = j.at("experiment").get<std::string>();
  if (j.contains("model")) c.model = model_from_json(j.at("model"));
  if (j.contains("train")) c.train = train_from_json(j.at("train"));
  if (j.contains("data")) {
    const json& d = j.at("data");
    detail::check_keys(d, {"dir", "train_images", "train_labels", "test_images", "test_labels"},
                       "data");
    if (d.contains("dir")) c.data = DataPaths::from_dir(d.at("dir").get<std::string>());
    if (d.contains("train_images")) c.data.train_images = d.at("train_images").get<std::string>();
    if (d.contains("train_labels")) c.data.train_labels = d.at("train_labels").get<std::string>();
    if (d.contains("test_images")) c.data.test_images = d.at("test_images").get<std::string>();
    if (d.contains("test_labels")) c.data.test_labels = d.at("test_labels").get<std::string>();
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("periods")) c.periods = j.at("periods").get<std::vector<int>>();
  if (j.contains("realizations")) c.realizations = j.at("realizations").get<int>();
  if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
  if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
  if (j.contains("histogram_bins")) c.histogram_bins = j.at("histogram_bins").get<int>();
  if (j.contains("include_identity_coefficient"))
    c.include_identity_coefficient = j.at("include_identity_coefficient").get<bool>();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace qerc::experiments
