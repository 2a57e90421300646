#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qerc/errors.hpp"
#include "qerc/linalg.hpp"
#include "qerc/rng.hpp"

namespace qerc::reservoir {

using linalg::Complex;
using linalg::HermitianMatrix;
using linalg::Matrix;
using linalg::UnitaryMatrix;
using rng::kPi;
using rng::RandomSeed;
using rng::SplitMix64;

/// Parameters of the driven spin chain. The drive alternates a global x
/// rotation of strength g(1-eps) with Ising zz couplings J0/|l-m|^alpha plus
/// per-qubit z fields D_l, each half applied for T/2. Angles are premultiplied
/// by the period (gT, J0T, D_lT).
struct DtcParams {
  int L = 10;
  double gT = kPi;
  double epsilon = 0.03;
  double J0T = 0.12;
  double alpha = 1.51;
  std::vector<double> disorderT;  // empty means zero field on every qubit

  void validate() const {
    if (L < 1) throw Error("DtcParams: L must be >= 1");
    if (L > 24) throw Error("DtcParams: L > 24 exceeds the dense-matrix regime");
    if (!(std::isfinite(gT) && std::isfinite(epsilon) && std::isfinite(J0T) &&
          std::isfinite(alpha)))
      throw Error("DtcParams: parameters must be finite");
    if (epsilon < 0.0 || epsilon >= 1.0) throw Error("DtcParams: epsilon must be in [0, 1)");
    if (!disorderT.empty() && disorderT.size() != static_cast<std::size_t>(L))
      throw Error("DtcParams: disorderT must have exactly L entries");
    for (double d : disorderT)
      if (!std::isfinite(d)) throw Error("DtcParams: disorder must be finite");
  }

  Eigen::Index dim() const { return Eigen::Index{1} << L; }
  double disorder(int l) const { return disorderT.empty() ? 0.0 : disorderT[static_cast<std::size_t>(l)]; }
};

/// Single-qubit kernel of the first half step: exp(-i theta sigma_x) with
/// theta = gT(1-eps)/2.
inline Eigen::Matrix2cd x_half_rotation(double gT, double epsilon) {
  const double theta = gT * (1.0 - epsilon) / 2.0;
  Eigen::Matrix2cd r;
  r << Complex(std::cos(theta), 0.0), Complex(0.0, -std::sin(theta)),
      Complex(0.0, -std::sin(theta)), Complex(std::cos(theta), 0.0);
  return r;
}

/// exp(-i H1 T/2): the tensor power of the single-qubit x rotation.
/// Qubit 1 is the most significant bit of the basis index.
inline UnitaryMatrix h1_half_step(const DtcParams& params) {
  params.validate();
  const Eigen::Matrix2cd r = x_half_rotation(params.gT, params.epsilon);
  Matrix u = r;
  for (int l = 1; l < params.L; ++l) u = linalg::kron(u, r);
  return UnitaryMatrix(std::move(u));
}

/// exp(-i H2 T/2): diagonal in the computational basis. Basis bit 0 maps to
/// z = +1, bit 1 to z = -1; each unordered pair (l < m) is summed once with
/// coupling J0T/|l-m|^alpha.
inline UnitaryMatrix h2_half_step(const DtcParams& params) {
  params.validate();
  const int L = params.L;
  const Eigen::Index n = params.dim();
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    double z[64];
    for (int l = 0; l < L; ++l)
      z[l] = ((idx >> (L - 1 - l)) & 1) ? -1.0 : 1.0;
    double phase = 0.0;
    for (int l = 0; l < L; ++l) {
      for (int m = l + 1; m < L; ++m)
        phase += params.J0T / std::pow(static_cast<double>(m - l), params.alpha) * z[l] * z[m];
      phase += params.disorder(l) * z[l];
    }
    u(idx, idx) = std::exp(Complex(0.0, -phase / 2.0));
  }
  return UnitaryMatrix(std::move(u));
}

/// One-period Floquet operator F = exp(-i H2 T/2) exp(-i H1 T/2).
inline UnitaryMatrix floquet_operator(const DtcParams& params) {
  const UnitaryMatrix u1 = h1_half_step(params);
  const UnitaryMatrix u2 = h2_half_step(params);
  Matrix f = u2.mat().diagonal().asDiagonal() * u1.mat();
  return UnitaryMatrix(std::move(f));
}

/// Per-qubit disorder fields D_lT drawn uniformly from [0, 2pi).
inline std::vector<double> sample_disorder(int L, RandomSeed seed) {
  if (L < 1) throw Error("sample_disorder: L must be >= 1");
  SplitMix64 gen(seed);
  std::vector<double> d(static_cast<std::size_t>(L));
  for (auto& v : d) v = 2.0 * kPi * gen.next_open01();
  return d;
}

enum class FeatureMapKind { Dtc, DisorderedDtc, Haar, TailedHaar, Cauchy };

inline const char* kind_name(FeatureMapKind k) {
  switch (k) {
    case FeatureMapKind::Dtc: return "dtc";
    case FeatureMapKind::DisorderedDtc: return "disordered-dtc";
    case FeatureMapKind::Haar: return "haar";
    case FeatureMapKind::TailedHaar: return "tailed-haar";
    case FeatureMapKind::Cauchy: return "cauchy";
  }
  return "?";
}

inline bool is_random_kind(FeatureMapKind k) { return k != FeatureMapKind::Dtc; }

/// Recipe for a feature-map unitary. The qubit count lives in dtc.L for every
/// kind; n_periods applies to the DTC kinds, gamma to the Cauchy kind, and
/// seed to every random element (samplers and disorder draws).
struct FeatureMapSpec {
  FeatureMapKind kind = FeatureMapKind::Dtc;
  DtcParams dtc{};
  int n_periods = 100;
  double gamma = 0.04;
  RandomSeed seed{1};

  int qubits() const { return dtc.L; }
  Eigen::Index dim() const { return dtc.dim(); }

  void validate() const {
    dtc.validate();
    const bool dtc_kind = kind == FeatureMapKind::Dtc || kind == FeatureMapKind::DisorderedDtc;
    if (dtc_kind && n_periods < 1) throw Error("FeatureMapSpec: n_periods must be >= 1");
    if (kind == FeatureMapKind::Cauchy && !(gamma > 0.0))
      throw Error("FeatureMapSpec: gamma must be positive");
  }
};

/// Stroboscopic evolution F^n for the DTC kinds.
inline UnitaryMatrix stroboscopic_unitary(const FeatureMapSpec& spec) {
  spec.validate();
  if (spec.kind != FeatureMapKind::Dtc && spec.kind != FeatureMapKind::DisorderedDtc)
    throw Error("stroboscopic_unitary: spec must be a DTC kind");
  DtcParams params = spec.dtc;
  if (spec.kind == FeatureMapKind::DisorderedDtc && params.disorderT.empty())
    params.disorderT = sample_disorder(params.L, spec.seed);
  return linalg::matrix_power(floquet_operator(params), spec.n_periods);
}

struct TailedHaarResult {
  UnitaryMatrix unitary;
  std::vector<std::pair<int, int>> pairs;  // modified (i, j), i < j, in draw order
  HermitianMatrix generator;               // the tailed generator G' itself
};

/// Haar generator with an injected tail: n_pairs upper-triangular entries of
/// G = i log(U_Haar) are replaced by complex numbers with Re and Im uniform
/// in [0.2, 2), mirrored conjugately, and re-exponentiated. If the log lands
/// on the branch cut a fresh Haar sample is drawn (at most 10 retries).
/// n_pairs = 0 reproduces the plain Haar unitary.
///
/// The injection pushes the spectral radius of G' past pi, so the principal
/// log of the returned unitary is NOT G'. Weight analyses of this model must
/// read the generator field, which carries the tail exactly as injected.
inline TailedHaarResult tailed_haar_unitary(int n, RandomSeed seed, int n_pairs = 10) {
  if (n_pairs < 0) throw Error("tailed_haar_unitary: n_pairs must be >= 0");
  if (n_pairs > 0 && n < 21) throw Error("tailed_haar_unitary: dimension must be >= 21");
  static constexpr int kMaxRetries = 10;
  for (int attempt = 0;; ++attempt) {
    const RandomSeed sub = attempt == 0 ? seed : seed.derive(static_cast<std::uint64_t>(attempt));
    Matrix gm;
    try {
      gm = linalg::principal_log_unitary(linalg::haar_unitary(n, sub)).mat();
    } catch (const NegativeRealEigenvalue&) {
      if (attempt >= kMaxRetries) throw;
      continue;
    }
    SplitMix64 inj(sub.derive(0x7a11));
    std::vector<Complex> values(static_cast<std::size_t>(n_pairs));
    for (auto& v : values)
      v = Complex(inj.next_uniform(0.2, 2.0), inj.next_uniform(0.2, 2.0));
    std::vector<std::pair<int, int>> pairs;
    std::set<std::pair<int, int>> seen;
    while (pairs.size() < static_cast<std::size_t>(n_pairs)) {
      const int i = static_cast<int>(inj.next_below(static_cast<std::uint64_t>(n)));
      const int j = static_cast<int>(inj.next_below(static_cast<std::uint64_t>(n)));
      if (i == j) continue;
      const auto p = std::minmax(i, j);
      if (!seen.insert(p).second) continue;
      pairs.push_back(p);
    }
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      gm(pairs[t].first, pairs[t].second) = values[t];
      gm(pairs[t].second, pairs[t].first) = std::conj(values[t]);
    }
    HermitianMatrix tailed(std::move(gm));
    UnitaryMatrix u_tailed = linalg::exp_neg_i(tailed);
    return {std::move(u_tailed), std::move(pairs), std::move(tailed)};
  }
}

/// Builds the reservoir unitary named by the spec.
inline UnitaryMatrix build_feature_map(const FeatureMapSpec& spec) {
  spec.validate();
  const int n = static_cast<int>(spec.dim());
  switch (spec.kind) {
    case FeatureMapKind::Dtc:
    case FeatureMapKind::DisorderedDtc:
      return stroboscopic_unitary(spec);
    case FeatureMapKind::Haar:
      return linalg::haar_unitary(n, spec.seed);
    case FeatureMapKind::TailedHaar:
      return tailed_haar_unitary(n, spec.seed).unitary;
    case FeatureMapKind::Cauchy:
      return linalg::cauchy_unitary(n, spec.gamma, spec.seed);
  }
  throw Error("build_feature_map: unknown kind");
}

}  // namespace qerc::reservoir
