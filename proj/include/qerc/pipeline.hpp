#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qerc/dataset.hpp"
#include "qerc/errors.hpp"
#include "qerc/linalg.hpp"
#include "qerc/reservoir.hpp"
#include "qerc/rng.hpp"

namespace qerc::pipeline {

using dataset::EncodedDataset;
using dataset::EncodedSample;
using linalg::UnitaryMatrix;
using rng::RandomSeed;
using rng::SplitMix64;

inline constexpr int kClasses = 10;

/// Computational-basis measurement distribution of U|psi>, in the
/// infinite-shot limit.
struct FeatureVector {
  Eigen::VectorXd probs;  // 2^L entries, nonnegative, sum 1
};

inline FeatureVector feature_vector(const UnitaryMatrix& u, const Eigen::VectorXcd& state) {
  if (u.dim() != state.size())
    throw DimensionMismatch("feature_vector: unitary dim " + std::to_string(u.dim()) +
                            " vs state dim " + std::to_string(state.size()));
  const Eigen::VectorXcd out = u.mat() * state;
  Eigen::VectorXd p = out.cwiseAbs2();
  p /= p.sum();
  return {std::move(p)};
}

inline FeatureVector feature_vector(const UnitaryMatrix& u, const EncodedSample& s) {
  return feature_vector(u, s.state);
}

/// Finite-shot ablation: replaces the exact distribution by multinomial
/// frequencies from `shots` seeded projective measurements.
inline FeatureVector sample_shots(const FeatureVector& exact, int shots, RandomSeed seed) {
  if (shots < 1) throw Error("sample_shots: shots must be >= 1");
  const Eigen::Index dim = exact.probs.size();
  Eigen::VectorXd cdf(dim);
  double acc = 0.0;
  for (Eigen::Index z = 0; z < dim; ++z) {
    acc += exact.probs[z];
    cdf[z] = acc;
  }
  SplitMix64 gen(seed);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
  for (int s = 0; s < shots; ++s) {
    const double u = gen.next_open01() * acc;
    const double* hit = std::lower_bound(cdf.data(), cdf.data() + dim, u);
    counts[std::min<Eigen::Index>(hit - cdf.data(), dim - 1)] += 1.0;
  }
  return {counts / static_cast<double>(shots)};
}

/// Applies the reservoir to every angle-encoded sample and stacks the
/// measurement distributions row-wise. States are built and multiplied in
/// fixed-size chunks, so results do not depend on available memory or thread
/// count.
inline Eigen::MatrixXd feature_matrix(const UnitaryMatrix& u, const Eigen::MatrixXd& angles,
                                      Eigen::Index chunk = 2048) {
  const Eigen::Index n = angles.rows();
  const Eigen::Index dim = u.dim();
  if (angles.cols() % 2 != 0 || (Eigen::Index{1} << (angles.cols() / 2)) != dim)
    throw DimensionMismatch("feature_matrix: angle columns do not match unitary dimension");
  Eigen::MatrixXd features(n, dim);
  Eigen::MatrixXcd states(dim, chunk);
  for (Eigen::Index start = 0; start < n; start += chunk) {
    const Eigen::Index len = std::min(chunk, n - start);
    for (Eigen::Index i = 0; i < len; ++i)
      states.col(i) = dataset::state_from_angles(angles.row(start + i).transpose());
    const Eigen::MatrixXcd out = u.mat() * states.leftCols(len);
    for (Eigen::Index i = 0; i < len; ++i) {
      Eigen::VectorXd p = out.col(i).cwiseAbs2();
      features.row(start + i) = (p / p.sum()).transpose();
    }
  }
  return features;
}

/// One-layer network: softmax(W p + bias) over 10 classes.
struct OnnParams {
  Eigen::MatrixXd weights;  // kClasses x dim
  Eigen::VectorXd bias;     // kClasses

  static OnnParams zeros(Eigen::Index dim) {
    return {Eigen::MatrixXd::Zero(kClasses, dim), Eigen::VectorXd::Zero(kClasses)};
  }
};

/// 1-based inclusive epoch interval for window statistics.
struct EpochWindow {
  int first = 250;
  int last = 300;
};

struct TrainConfig {
  int epochs = 300;
  int batch_size = 100;
  double learning_rate = 0.1;
  RandomSeed seed{1};
  EpochWindow window{250, 300};
};

struct TrainHistory {
  std::vector<double> train_accuracy;  // one entry per epoch
  std::vector<double> test_accuracy;
  OnnParams params;
};

namespace detail {

inline Eigen::MatrixXd softmax_rows(Eigen::MatrixXd z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double zmax = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - zmax).exp();
    z.row(i) /= z.row(i).sum();
  }
  return z;
}

inline void check_labels(const std::vector<int>& labels) {
  for (int y : labels)
    if (y < 0 || y >= kClasses) throw Error("train_onn: label " + std::to_string(y) + " out of range");
}

}  // namespace detail

/// Mean cross-entropy of the softmax outputs against integer labels.
inline double cross_entropy_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                 const OnnParams& p) {
  Eigen::MatrixXd z = x * p.weights.transpose();
  z.rowwise() += p.bias.transpose();
  const Eigen::MatrixXd s = detail::softmax_rows(std::move(z));
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    loss -= std::log(std::max(s(i, y[static_cast<std::size_t>(i)]), 1e-300));
  return loss / static_cast<double>(x.rows());
}

struct OnnGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

/// Analytic gradient of cross_entropy_loss with respect to W and bias.
inline OnnGradient onn_gradient(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                const OnnParams& p) {
  Eigen::MatrixXd z = x * p.weights.transpose();
  z.rowwise() += p.bias.transpose();
  Eigen::MatrixXd delta = detail::softmax_rows(std::move(z));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  delta /= static_cast<double>(x.rows());
  return {delta.transpose() * x, delta.colwise().sum().transpose()};
}

/// Fraction of samples whose largest logit matches the label. Ties resolve to
/// the lowest class index.
inline double onn_accuracy(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const OnnParams& p) {
  Eigen::MatrixXd z = x * p.weights.transpose();
  z.rowwise() += p.bias.transpose();
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < kClasses; ++c)
      if (z(i, c) > z(i, best)) best = c;
    if (best == y[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

/// Mini-batch SGD on the softmax cross-entropy, from zero-initialized
/// parameters. The sample order is reshuffled every epoch from the config
/// seed, and full train/test accuracies are recorded per epoch. Two runs with
/// the same config and inputs produce identical histories.
inline TrainHistory train_onn(const Eigen::MatrixXd& x, const std::vector<int>& y,
                              const Eigen::MatrixXd& x_test, const std::vector<int>& y_test,
                              const TrainConfig& cfg) {
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  if (n == 0 || static_cast<std::size_t>(n) != y.size())
    throw DimensionMismatch("train_onn: train features/labels mismatch");
  if (static_cast<std::size_t>(x_test.rows()) != y_test.size() || x_test.cols() != dim)
    throw DimensionMismatch("train_onn: test features/labels mismatch");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0))
    throw Error("train_onn: invalid config");
  detail::check_labels(y);
  detail::check_labels(y_test);

  OnnParams p = OnnParams::zeros(dim);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  const Eigen::Index batch = cfg.batch_size;
  Eigen::MatrixXd xb(batch, dim);
  std::vector<int> yb(static_cast<std::size_t>(batch));

  TrainHistory history;
  history.train_accuracy.reserve(static_cast<std::size_t>(cfg.epochs));
  history.test_accuracy.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    SplitMix64 shuffler(cfg.seed.derive(static_cast<std::uint64_t>(epoch)));
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      const Eigen::Index j =
          i + static_cast<Eigen::Index>(shuffler.next_below(static_cast<std::uint64_t>(n - i)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      for (Eigen::Index i = 0; i < len; ++i) {
        const Eigen::Index src = perm[static_cast<std::size_t>(start + i)];
        xb.row(i) = x.row(src);
        yb[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(src)];
      }
      Eigen::MatrixXd z = xb.topRows(len) * p.weights.transpose();
      z.rowwise() += p.bias.transpose();
      Eigen::MatrixXd delta = detail::softmax_rows(std::move(z));
      for (Eigen::Index i = 0; i < len; ++i) delta(i, yb[static_cast<std::size_t>(i)]) -= 1.0;
      delta /= static_cast<double>(len);
      p.weights.noalias() -= cfg.learning_rate * (delta.transpose() * xb.topRows(len));
      p.bias -= cfg.learning_rate * delta.colwise().sum().transpose();
    }
    history.train_accuracy.push_back(onn_accuracy(x, y, p));
    history.test_accuracy.push_back(onn_accuracy(x_test, y_test, p));
  }
  history.params = std::move(p);
  return history;
}

/// Epoch-window statistics of a training run. Standard deviations are
/// population deviations over the window.
struct AccuracyReport {
  double test_mean = 0.0;
  double test_std = 0.0;
  double train_mean = 0.0;
  double train_std = 0.0;
  double delta_acc = 0.0;  // train_mean - test_mean
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v, std::size_t first,
                                          std::size_t last) {
  double mean = 0.0;
  for (std::size_t i = first; i <= last; ++i) mean += v[i];
  mean /= static_cast<double>(last - first + 1);
  double var = 0.0;
  for (std::size_t i = first; i <= last; ++i) var += (v[i] - mean) * (v[i] - mean);
  var /= static_cast<double>(last - first + 1);
  return {mean, std::sqrt(var)};
}

}  // namespace detail

inline AccuracyReport accuracy_report(const TrainHistory& h, const EpochWindow& window) {
  const int epochs = static_cast<int>(h.train_accuracy.size());
  if (window.first < 1 || window.last < window.first || window.last > epochs)
    throw WindowOutOfRange("accuracy_report: window [" + std::to_string(window.first) + ", " +
                           std::to_string(window.last) + "] outside 1.." +
                           std::to_string(epochs));
  const auto first = static_cast<std::size_t>(window.first - 1);
  const auto last = static_cast<std::size_t>(window.last - 1);
  AccuracyReport r;
  std::tie(r.train_mean, r.train_std) = detail::mean_std(h.train_accuracy, first, last);
  std::tie(r.test_mean, r.test_std) = detail::mean_std(h.test_accuracy, first, last);
  r.delta_acc = r.train_mean - r.test_mean;
  return r;
}

/// Feature extraction plus training for one reservoir unitary.
inline TrainHistory run_pipeline(const UnitaryMatrix& u, const EncodedDataset& data,
                                 const TrainConfig& cfg) {
  const Eigen::MatrixXd train = feature_matrix(u, data.train_angles);
  const Eigen::MatrixXd test = feature_matrix(u, data.test_angles);
  return train_onn(train, data.train_labels, test, data.test_labels, cfg);
}

/// Window reports aggregated across independent realizations of a random
/// feature map. Realization r uses model seed spec.seed + r and training seed
/// cfg.seed + r.
struct EnsembleReport {
  std::vector<AccuracyReport> realizations;
  AccuracyReport aggregate;  // means/stds across realizations of window means
};

inline EnsembleReport ensemble_report(const reservoir::FeatureMapSpec& spec, int n_realizations,
                                      const TrainConfig& cfg, const EncodedDataset& data) {
  if (!reservoir::is_random_kind(spec.kind))
    throw Error("ensemble_report: feature map has no random element");
  if (n_realizations < 1) throw Error("ensemble_report: need at least one realization");

  EnsembleReport report;
  std::vector<double> test_means, train_means;
  for (int r = 1; r <= n_realizations; ++r) {
    reservoir::FeatureMapSpec spec_r = spec;
    spec_r.seed = spec.seed.offset(static_cast<std::uint64_t>(r));
    TrainConfig cfg_r = cfg;
    cfg_r.seed = cfg.seed.offset(static_cast<std::uint64_t>(r));
    const UnitaryMatrix u = reservoir::build_feature_map(spec_r);
    const TrainHistory h = run_pipeline(u, data, cfg_r);
    report.realizations.push_back(accuracy_report(h, cfg.window));
    test_means.push_back(report.realizations.back().test_mean);
    train_means.push_back(report.realizations.back().train_mean);
  }
  std::tie(report.aggregate.test_mean, report.aggregate.test_std) =
      detail::mean_std(test_means, 0, test_means.size() - 1);
  std::tie(report.aggregate.train_mean, report.aggregate.train_std) =
      detail::mean_std(train_means, 0, train_means.size() - 1);
  report.aggregate.delta_acc = report.aggregate.train_mean - report.aggregate.test_mean;
  return report;
}

}  // namespace qerc::pipeline
