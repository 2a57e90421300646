#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "qerc/errors.hpp"
#include "qerc/linalg.hpp"
#include "qerc/rng.hpp"

namespace qerc::dataset {

using linalg::Complex;
using rng::kPi;

/// A loaded MNIST split: one image per row, pixel bytes scaled to [0, 1].
struct MnistSet {
  Eigen::MatrixXd images;   // n x (rows*cols)
  std::vector<int> labels;  // n entries in [0, 9]
  std::string split;        // "train" or "test"

  Eigen::Index size() const { return images.rows(); }
};

namespace detail {

inline std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw TruncatedFile("load_mnist: unexpected end of header in " + path);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace detail

/// Reads an IDX image/label file pair (magic 2051 / 2049, big-endian
/// dimensions, unsigned pixel bytes).
inline MnistSet load_mnist(const std::string& images_path, const std::string& labels_path,
                           const std::string& split = "") {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw TruncatedFile("load_mnist: cannot open " + images_path);
  const std::uint32_t img_magic = detail::read_be_u32(img, images_path);
  if (img_magic != 2051)
    throw BadMagic("load_mnist: bad image magic " + std::to_string(img_magic) + " in " +
                   images_path);
  const std::uint32_t n_img = detail::read_be_u32(img, images_path);
  const std::uint32_t rows = detail::read_be_u32(img, images_path);
  const std::uint32_t cols = detail::read_be_u32(img, images_path);
  const std::size_t pixels = std::size_t(rows) * cols;

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw TruncatedFile("load_mnist: cannot open " + labels_path);
  const std::uint32_t lab_magic = detail::read_be_u32(lab, labels_path);
  if (lab_magic != 2049)
    throw BadMagic("load_mnist: bad label magic " + std::to_string(lab_magic) + " in " +
                   labels_path);
  const std::uint32_t n_lab = detail::read_be_u32(lab, labels_path);
  if (n_img != n_lab)
    throw CountMismatch("load_mnist: " + std::to_string(n_img) + " images vs " +
                        std::to_string(n_lab) + " labels");

  MnistSet set;
  set.split = split;
  set.images.resize(n_img, static_cast<Eigen::Index>(pixels));
  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
      throw TruncatedFile("load_mnist: image data ends early in " + images_path);
    for (std::size_t p = 0; p < pixels; ++p)
      set.images(i, static_cast<Eigen::Index>(p)) = static_cast<double>(buf[p]) / 255.0;
  }
  set.labels.resize(n_img);
  for (std::uint32_t i = 0; i < n_lab; ++i) {
    char c;
    if (!lab.read(&c, 1))
      throw TruncatedFile("load_mnist: label data ends early in " + labels_path);
    const int label = static_cast<unsigned char>(c);
    if (label > 9) throw Error("load_mnist: label " + std::to_string(label) + " out of range");
    set.labels[i] = label;
  }
  return set;
}

/// Principal components of the training images, plus the feature ranges used
/// to normalize projections into rotation angles.
struct PcaModel {
  Eigen::VectorXd mean;         // input dimension
  Eigen::MatrixXd components;   // k x dim, rows orthonormal, descending eigenvalue
  Eigen::VectorXd eigenvalues;  // k, descending
  Eigen::VectorXd feature_min;  // componentwise over training projections
  Eigen::VectorXd feature_max;

  Eigen::Index n_components() const { return components.rows(); }

  Eigen::VectorXd project(const Eigen::VectorXd& image) const {
    if (image.size() != mean.size())
      throw DimensionMismatch("PcaModel::project: image dimension mismatch");
    return components * (image - mean);
  }
};

/// Covariance PCA on the training set. The covariance is accumulated from
/// mean-centered row chunks, eigendecomposed, and the top-k eigenvectors kept
/// with the sign fixed so each component's largest-magnitude coordinate is
/// positive.
inline PcaModel fit_pca(const MnistSet& train, int k) {
  const Eigen::Index n = train.images.rows();
  const Eigen::Index d = train.images.cols();
  if (n < 2) throw Error("fit_pca: need at least two samples");
  if (k < 1 || k > d) throw Error("fit_pca: k must be in [1, dim]");

  PcaModel model;
  model.mean = train.images.colwise().mean();

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  constexpr Eigen::Index kChunk = 4096;
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, n - start);
    Eigen::MatrixXd centered = train.images.middleRows(start, len);
    centered.rowwise() -= model.mean.transpose();
    cov.noalias() += centered.transpose() * centered;
  }
  cov /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw Error("fit_pca: eigendecomposition failed");
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const double tol = 1e-12 * std::max(evals[d - 1], 1.0);
  Eigen::Index positive = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (evals[i] > tol) ++positive;
  if (positive < k)
    throw RankDeficient("fit_pca: only " + std::to_string(positive) +
                        " positive eigenvalues for k = " + std::to_string(k));

  model.components.resize(k, d);
  model.eigenvalues.resize(k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - j);
    Eigen::Index imax = 0;
    for (Eigen::Index i = 1; i < d; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0) v = -v;
    model.components.row(j) = v.transpose();
    model.eigenvalues[j] = evals[d - 1 - j];
  }

  Eigen::MatrixXd proj(n, k);
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, n - start);
    Eigen::MatrixXd centered = train.images.middleRows(start, len);
    centered.rowwise() -= model.mean.transpose();
    proj.middleRows(start, len).noalias() = centered * model.components.transpose();
  }
  model.feature_min = proj.colwise().minCoeff();
  model.feature_max = proj.colwise().maxCoeff();
  return model;
}

/// Image encoded for the reservoir: 2L rotation angles and the resulting
/// L-qubit product state.
struct EncodedSample {
  Eigen::VectorXd angles;   // feature order: even entries theta in [0,pi], odd phi in [0,2pi]
  Eigen::VectorXcd state;   // 2^L amplitudes, unit norm
  int label = -1;
};

/// Min-max scaled features in [0, 1] (training range; outliers clipped).
inline Eigen::VectorXd scaled_features(const PcaModel& pca, const Eigen::VectorXd& image) {
  const Eigen::VectorXd t = pca.project(image);
  Eigen::VectorXd u(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double span = pca.feature_max[j] - pca.feature_min[j];
    u[j] = span > 0.0 ? std::clamp((t[j] - pca.feature_min[j]) / span, 0.0, 1.0) : 0.0;
  }
  return u;
}

/// Rotation angles from scaled features: feature 2l drives theta_l = pi*u and
/// feature 2l+1 drives phi_l = 2pi*u (0-based).
inline Eigen::VectorXd angles_from_features(const Eigen::VectorXd& u) {
  Eigen::VectorXd angles(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j)
    angles[j] = (j % 2 == 0 ? kPi : 2.0 * kPi) * u[j];
  return angles;
}

/// Product state from per-qubit angles: qubit l is Rz(phi) Ry(theta) |0> =
/// (cos(theta/2), e^{i phi} sin(theta/2)), qubit 1 most significant.
inline Eigen::VectorXcd state_from_angles(const Eigen::VectorXd& angles) {
  if (angles.size() % 2 != 0 || angles.size() == 0)
    throw DimensionMismatch("state_from_angles: need 2L angles");
  const Eigen::Index L = angles.size() / 2;
  Eigen::VectorXcd state = Eigen::VectorXcd::Ones(1);
  for (Eigen::Index l = 0; l < L; ++l) {
    const double theta = angles[2 * l];
    const double phi = angles[2 * l + 1];
    Eigen::Vector2cd q;
    q << Complex(std::cos(theta / 2.0), 0.0),
        std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
    Eigen::VectorXcd next(state.size() * 2);
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      next[2 * i] = state[i] * q[0];
      next[2 * i + 1] = state[i] * q[1];
    }
    state.swap(next);
  }
  return state;
}

inline EncodedSample encode(const Eigen::VectorXd& image, const PcaModel& pca, int L,
                            int label = -1) {
  if (pca.n_components() != 2 * static_cast<Eigen::Index>(L))
    throw DimensionMismatch("encode: PCA model must have exactly 2L components");
  EncodedSample s;
  s.angles = angles_from_features(scaled_features(pca, image));
  s.state = state_from_angles(s.angles);
  s.label = label;
  return s;
}

/// Angle-encoded dataset, the input the pipeline consumes. States are not
/// materialized here; they are rebuilt chunk-wise when a reservoir is applied.
struct EncodedDataset {
  int L = 0;
  Eigen::MatrixXd train_angles;  // n_train x 2L
  std::vector<int> train_labels;
  Eigen::MatrixXd test_angles;   // n_test x 2L
  std::vector<int> test_labels;
};

inline EncodedDataset encode_dataset(const MnistSet& train, const MnistSet& test,
                                     const PcaModel& pca, int L) {
  if (pca.n_components() != 2 * static_cast<Eigen::Index>(L))
    throw DimensionMismatch("encode_dataset: PCA model must have exactly 2L components");
  EncodedDataset out;
  out.L = L;
  out.train_angles.resize(train.size(), 2 * L);
  out.test_angles.resize(test.size(), 2 * L);
  for (Eigen::Index i = 0; i < train.size(); ++i)
    out.train_angles.row(i) =
        angles_from_features(scaled_features(pca, train.images.row(i))).transpose();
  for (Eigen::Index i = 0; i < test.size(); ++i)
    out.test_angles.row(i) =
        angles_from_features(scaled_features(pca, test.images.row(i))).transpose();
  out.train_labels = train.labels;
  out.test_labels = test.labels;
  return out;
}

}  // namespace qerc::dataset
