#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qerc/errors.hpp"
#include "qerc/linalg.hpp"

namespace qerc::netweights {

using linalg::HermitianMatrix;
using linalg::Matrix;

/// Coefficient family of the generator decomposition: x -> {a_lm},
/// y -> {b_lm}, z -> {c_k}.
enum class Component { x, y, z, none };

inline const char* component_name(Component c) {
  switch (c) {
    case Component::x: return "x";
    case Component::y: return "y";
    case Component::z: return "z";
    default: return "none";
  }
}

/// Real coefficients of a Hermitian matrix over the generalized Gell-Mann
/// generators:
///
///   G = sum_{l<m} (a_lm X_lm + b_lm Y_lm) + sum_k c_k Z_k
///
/// where X_lm has ones at (l,m),(m,l), Y_lm has -i at (l,m) and +i at (m,l),
/// Z_k = sqrt(2/(k(k+1))) diag(1,...,1,-k,0,...,0) for k < N and Z_N = I.
///
/// a and b are stored row-major over the strict upper triangle; c holds the
/// N diagonal coefficients with c[N-1] the identity coefficient Tr(G)/N.
/// Indices are 0-based throughout.
struct WeightSet {
  Eigen::Index dim = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;

  static std::size_t pair_count(Eigen::Index n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  }

  /// Flat index of the pair (l, m), l < m, in the row-major upper triangle.
  static std::size_t pair_index(Eigen::Index l, Eigen::Index m, Eigen::Index n) {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(n) -
           static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2 +
           static_cast<std::size_t>(m - l - 1);
  }
};

namespace detail {
inline double z_norm(Eigen::Index k) {  // k = 1..N-1
  return std::sqrt(2.0 / (static_cast<double>(k) * static_cast<double>(k + 1)));
}
}  // namespace detail

/// Expands G over the generator basis. The off-diagonal coefficients read off
/// directly (a_lm = Re G_lm, b_lm = -Im G_lm); the diagonal ones are the
/// normalized traces c_k = Tr(G Z_k)/2 for k < N and c_N = Tr(G)/N.
inline WeightSet decompose(const HermitianMatrix& g) {
  const Matrix& m = g.mat();
  const Eigen::Index n = m.rows();
  WeightSet w;
  w.dim = n;
  w.a.resize(WeightSet::pair_count(n));
  w.b.resize(WeightSet::pair_count(n));
  w.c.resize(static_cast<std::size_t>(n));

  std::size_t idx = 0;
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index mm = l + 1; mm < n; ++mm, ++idx) {
      w.a[idx] = m(l, mm).real();
      w.b[idx] = -m(l, mm).imag();
    }

  double prefix = 0.0;  // sum of G_jj for j < k
  for (Eigen::Index k = 1; k < n; ++k) {
    prefix += m(k - 1, k - 1).real();
    w.c[static_cast<std::size_t>(k - 1)] =
        detail::z_norm(k) * (prefix - static_cast<double>(k) * m(k, k).real()) / 2.0;
  }
  w.c[static_cast<std::size_t>(n - 1)] = (prefix + m(n - 1, n - 1).real()) / static_cast<double>(n);
  return w;
}

/// Inverse of decompose: reassembles the Hermitian matrix from its weights.
inline HermitianMatrix reconstruct(const WeightSet& w) {
  const Eigen::Index n = w.dim;
  if (n < 1 || w.a.size() != WeightSet::pair_count(n) || w.b.size() != w.a.size() ||
      w.c.size() != static_cast<std::size_t>(n))
    throw Error("reconstruct: inconsistent WeightSet shape");
  Matrix g = Matrix::Zero(n, n);
  std::size_t idx = 0;
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index m = l + 1; m < n; ++m, ++idx) {
      g(l, m) = linalg::Complex(w.a[idx], -w.b[idx]);
      g(m, l) = std::conj(g(l, m));
    }
  // suffix[j] = sum_{k >= j} z_norm(k) * c_k, k being the generator index
  std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index k = n - 1; k >= 1; --k)
    suffix[static_cast<std::size_t>(k)] =
        suffix[static_cast<std::size_t>(k + 1)] +
        detail::z_norm(k) * w.c[static_cast<std::size_t>(k - 1)];
  const double identity_term = w.c[static_cast<std::size_t>(n - 1)];
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = identity_term + suffix[static_cast<std::size_t>(j + 1)];
    if (j >= 1)
      d -= static_cast<double>(j) * detail::z_norm(j) * w.c[static_cast<std::size_t>(j - 1)];
    g(j, j) = d;
  }
  return HermitianMatrix(std::move(g));
}

/// The z-coefficient family as plotted: the identity coefficient c_N is a
/// global phase and is excluded unless asked for.
inline std::vector<double> z_component(const WeightSet& w, bool include_identity = false) {
  if (include_identity) return w.c;
  return std::vector<double>(w.c.begin(), w.c.end() - 1);
}

/// Histogram of one coefficient family: uniform bins over [min, max], windows
/// (s, s+ds] except the first bin which also takes its left edge. A set of
/// identical values cannot be binned and comes back as a spike descriptor.
struct WeightHistogram {
  Component component = Component::none;
  std::vector<double> bin_edges;        // bins+1 ascending (empty if spike)
  std::vector<std::int64_t> counts;     // per-bin counts
  std::vector<double> density;          // counts / (total * width)
  std::int64_t total = 0;
  bool is_spike = false;
  double spike_value = 0.0;

  double lo() const { return is_spike ? spike_value : bin_edges.front(); }
  double hi() const { return is_spike ? spike_value : bin_edges.back(); }
  std::size_t bins() const { return counts.size(); }
  double bin_center(std::size_t i) const { return (bin_edges[i] + bin_edges[i + 1]) / 2.0; }
};

inline WeightHistogram histogram(std::span<const double> values, int bins = 100,
                                 Component component = Component::none) {
  if (values.empty()) throw Error("histogram: no values");
  if (bins < 1) throw Error("histogram: bins must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;

  WeightHistogram h;
  h.component = component;
  h.total = static_cast<std::int64_t>(values.size());
  if (lo == hi) {
    h.is_spike = true;
    h.spike_value = lo;
    return h;
  }

  const double width = (hi - lo) / bins;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.bin_edges.back() = hi;  // exact upper edge
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    // (s, s+ds] windows: values on an interior edge belong to the lower bin
    long idx = static_cast<long>(std::ceil((v - lo) / width)) - 1;
    idx = std::clamp(idx, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  h.density.resize(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    const double w = h.bin_edges[static_cast<std::size_t>(i) + 1] - h.bin_edges[static_cast<std::size_t>(i)];
    h.density[static_cast<std::size_t>(i)] =
        static_cast<double>(h.counts[static_cast<std::size_t>(i)]) / (static_cast<double>(h.total) * w);
  }
  return h;
}

struct GaussianFit {
  double mu = 0.0;
  double sigma = 0.0;
  double residual = 0.0;  // RMS of log-density misfit over populated bins
};

/// Gaussian fit in log space: least squares of log(density) against a
/// quadratic in the bin centers, over populated bins. The curvature gives
/// sigma = sqrt(-1/(2 beta2)).
inline GaussianFit gaussian_fit(const WeightHistogram& h) {
  if (h.is_spike) throw InsufficientSupport("gaussian_fit: spike histogram has no support");
  std::vector<double> s, y;
  for (std::size_t i = 0; i < h.bins(); ++i)
    if (h.counts[i] > 0) {
      s.push_back(h.bin_center(i));
      y.push_back(std::log(h.density[i]));
    }
  if (s.size() < 5)
    throw InsufficientSupport("gaussian_fit: fewer than 5 populated bins (" +
                              std::to_string(s.size()) + ")");

  Eigen::MatrixXd x(s.size(), 3);
  Eigen::VectorXd rhs(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
    x(static_cast<Eigen::Index>(i), 1) = s[i];
    x(static_cast<Eigen::Index>(i), 2) = s[i] * s[i];
    rhs(static_cast<Eigen::Index>(i)) = y[i];
  }
  Eigen::Vector3d beta = x.householderQr().solve(rhs);
  if (!(beta[2] < 0.0))
    throw NonConcaveFit("gaussian_fit: quadratic coefficient " + std::to_string(beta[2]) +
                        " is not negative");
  GaussianFit fit;
  fit.sigma = std::sqrt(-1.0 / (2.0 * beta[2]));
  fit.mu = -beta[1] / (2.0 * beta[2]);
  fit.residual = std::sqrt((rhs - x * beta).squaredNorm() / static_cast<double>(s.size()));
  return fit;
}

struct TailMetrics {
  double max_abs = 0.0;
  std::int64_t count_beyond_5sigma = 0;
  double fraction_beyond_5sigma = 0.0;
};

inline TailMetrics tail_metrics(std::span<const double> values, double sigma_ref) {
  if (!(sigma_ref > 0.0)) throw Error("tail_metrics: sigma_ref must be positive");
  TailMetrics t;
  const double threshold = 5.0 * sigma_ref;
  for (double v : values) {
    const double m = std::abs(v);
    t.max_abs = std::max(t.max_abs, m);
    if (m > threshold) ++t.count_beyond_5sigma;
  }
  if (!values.empty())
    t.fraction_beyond_5sigma =
        static_cast<double>(t.count_beyond_5sigma) / static_cast<double>(values.size());
  return t;
}

/// Total-variation distance between two histograms after redistributing both
/// onto a common uniform 100-bin grid spanning the union of their ranges.
/// Source masses are split across target bins by interval overlap.
inline double histogram_distance(const WeightHistogram& h1, const WeightHistogram& h2,
                                 int bins = 100) {
  if (h1.is_spike || h2.is_spike)
    throw DegenerateRange("histogram_distance: spike histogram cannot be re-binned");
  const double lo = std::min(h1.lo(), h2.lo());
  const double hi = std::max(h1.hi(), h2.hi());
  const double width = (hi - lo) / bins;

  auto rebin = [&](const WeightHistogram& h) {
    std::vector<double> mass(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t i = 0; i < h.bins(); ++i) {
      if (h.counts[i] == 0) continue;
      const double a = h.bin_edges[i], b = h.bin_edges[i + 1];
      const double m = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
      long j0 = std::clamp(static_cast<long>((a - lo) / width), 0L, static_cast<long>(bins) - 1);
      long j1 = std::clamp(static_cast<long>((b - lo) / width), 0L, static_cast<long>(bins) - 1);
      for (long j = j0; j <= j1; ++j) {
        const double tlo = lo + width * static_cast<double>(j);
        const double overlap = std::min(b, tlo + width) - std::max(a, tlo);
        if (overlap > 0.0) mass[static_cast<std::size_t>(j)] += m * overlap / (b - a);
      }
    }
    return mass;
  };

  const auto p = rebin(h1), q = rebin(h2);
  double tv = 0.0;
  for (int j = 0; j < bins; ++j)
    tv += std::abs(p[static_cast<std::size_t>(j)] - q[static_cast<std::size_t>(j)]);
  return tv / 2.0;
}

}  // namespace qerc::netweights
