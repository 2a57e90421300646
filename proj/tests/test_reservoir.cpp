#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <set>

#include "oracles.hpp"
#include "qerc/linalg.hpp"
#include "qerc/netweights.hpp"
#include "qerc/reservoir.hpp"

using namespace qerc::reservoir;
using qerc::linalg::Matrix;
using qerc::linalg::UnitaryMatrix;
using qerc::rng::kPi;
using qerc::rng::RandomSeed;
using Catch::Approx;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

DtcParams paper_defaults(int L = 10) {
  DtcParams p;
  p.L = L;
  p.gT = kPi;
  p.epsilon = 0.03;
  p.J0T = 0.12;
  p.alpha = 1.51;
  return p;
}

// H1 = g(1-eps) sum_l sigma_x_l assembled as a dense matrix, evolved for T/2
Matrix dense_h1_half(const DtcParams& p) {
  const Eigen::Index n = p.dim();
  Matrix h = Matrix::Zero(n, n);
  for (int l = 0; l < p.L; ++l) h += oracles::pauli_on('x', l, p.L);
  h *= p.gT * (1.0 - p.epsilon) / 2.0;
  return oracles::exp_neg_i_taylor(h, 120);
}

// H2 = sum_{l<m} J0/|l-m|^alpha zz + sum_l D_l z, evolved for T/2
Matrix dense_h2_half(const DtcParams& p) {
  const Eigen::Index n = p.dim();
  Matrix h = Matrix::Zero(n, n);
  for (int l = 0; l < p.L; ++l) {
    for (int m = l + 1; m < p.L; ++m)
      h += (p.J0T / std::pow(m - l, p.alpha)) *
           (oracles::pauli_on('z', l, p.L) * oracles::pauli_on('z', m, p.L));
    h += p.disorder(l) * oracles::pauli_on('z', l, p.L);
  }
  h /= 2.0;
  return oracles::exp_neg_i_taylor(h, 120);
}

}  // namespace

TEST_CASE("single-qubit x rotation at the exact pi pulse", "[reservoir]") {
  // gT=pi, eps=0: exp(-i (pi/2) sigma_x) = -i sigma_x
  const Eigen::Matrix2cd r = x_half_rotation(kPi, 0.0);
  const Matrix expected = std::complex<double>(0.0, -1.0) * oracles::pauli('x');
  REQUIRE(max_diff(r, expected) < 1e-15);
}

TEST_CASE("rotation angle carries the epsilon error", "[reservoir]") {
  // eps=0.03, gT=pi: theta = 0.485 pi per qubit
  const Eigen::Matrix2cd r = x_half_rotation(kPi, 0.03);
  REQUIRE(r(0, 0).real() == Approx(std::cos(0.485 * kPi)).epsilon(1e-14));
  REQUIRE(r(0, 1).imag() == Approx(-std::sin(0.485 * kPi)).epsilon(1e-14));

  DtcParams p = paper_defaults(10);
  const UnitaryMatrix u = h1_half_step(p);
  REQUIRE(u.dim() == 1024);
  // tensor-power structure: entry (0,0) is cos(theta)^L
  REQUIRE(u.mat()(0, 0).real() == Approx(std::pow(std::cos(0.485 * kPi), 10)).epsilon(1e-10));
}

TEST_CASE("h1 half step equals the dense exponential", "[reservoir]") {
  DtcParams p = paper_defaults(2);
  p.epsilon = 0.5;
  REQUIRE(max_diff(h1_half_step(p).mat(), dense_h1_half(p)) < 1e-12);
}

TEST_CASE("h2 half step is the identity without couplings", "[reservoir]") {
  DtcParams p = paper_defaults(3);
  p.J0T = 0.0;
  REQUIRE(max_diff(h2_half_step(p).mat(), Matrix::Identity(8, 8)) < 1e-15);
}

TEST_CASE("h2 phases at L=2 follow the zz sign pattern", "[reservoir]") {
  DtcParams p = paper_defaults(2);
  const Matrix u = h2_half_step(p).mat();
  const std::complex<double> aligned = std::exp(std::complex<double>(0.0, -0.06));
  const std::complex<double> anti = std::exp(std::complex<double>(0.0, 0.06));
  REQUIRE(std::abs(u(0, 0) - aligned) < 1e-14);  // |00>
  REQUIRE(std::abs(u(3, 3) - aligned) < 1e-14);  // |11>
  REQUIRE(std::abs(u(1, 1) - anti) < 1e-14);     // |01>
  REQUIRE(std::abs(u(2, 2) - anti) < 1e-14);     // |10>
}

TEST_CASE("h2 half step equals the dense exponential with disorder", "[reservoir]") {
  DtcParams p = paper_defaults(3);
  p.disorderT = sample_disorder(3, RandomSeed{19});
  REQUIRE(max_diff(h2_half_step(p).mat(), dense_h2_half(p)) < 1e-12);
}

TEST_CASE("h2 output is exactly diagonal with unit-modulus entries", "[reservoir]") {
  DtcParams p = paper_defaults(4);
  p.disorderT = sample_disorder(4, RandomSeed{23});
  const Matrix u = h2_half_step(p).mat();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    REQUIRE(std::abs(std::abs(u(i, i)) - 1.0) < 1e-12);
    for (Eigen::Index j = 0; j < u.cols(); ++j)
      if (i != j) REQUIRE(u(i, j) == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("perfect drive squares to a global sign", "[reservoir]") {
  for (int L : {2, 3}) {
    DtcParams p = paper_defaults(L);
    p.epsilon = 0.0;
    p.J0T = 0.0;
    const UnitaryMatrix f = floquet_operator(p);
    const Matrix f2 = f.mat() * f.mat();
    const double sign = (L % 2 == 0) ? 1.0 : -1.0;
    REQUIRE(max_diff(f2, sign * Matrix::Identity(p.dim(), p.dim())) < 1e-12);
  }
}

TEST_CASE("floquet operator composes the half steps in order", "[reservoir]") {
  DtcParams p = paper_defaults(3);
  p.disorderT = sample_disorder(3, RandomSeed{29});
  const Matrix f = floquet_operator(p).mat();
  REQUIRE(max_diff(f, h2_half_step(p).mat() * h1_half_step(p).mat()) < 1e-14);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(8);
  psi[5] = 1.0;
  const Eigen::VectorXcd direct = f * psi;
  const Eigen::VectorXcd stepped = h2_half_step(p).mat() * (h1_half_step(p).mat() * psi);
  REQUIRE((direct - stepped).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("floquet operator at the paper scale is unitary", "[reservoir][slow]") {
  const UnitaryMatrix f = floquet_operator(paper_defaults(10));
  REQUIRE(f.dim() == 1024);
  REQUIRE(qerc::linalg::unitarity_defect(f.mat()) <= 1e-10);
}

TEST_CASE("stroboscopic evolution is a matrix power", "[reservoir]") {
  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Dtc;
  spec.dtc = paper_defaults(3);
  spec.n_periods = 1;
  const Matrix f = floquet_operator(spec.dtc).mat();
  REQUIRE(max_diff(stroboscopic_unitary(spec).mat(), f) < 1e-15);

  spec.n_periods = 2;
  REQUIRE(max_diff(stroboscopic_unitary(spec).mat(), f * f) < 1e-12);
}

TEST_CASE("stroboscopic powers compose", "[reservoir]") {
  // F^n = F^m F^(n-m) for n=200, m=120
  DtcParams p = paper_defaults(4);
  const UnitaryMatrix f = floquet_operator(p);
  const Matrix lhs = qerc::linalg::matrix_power(f, 200).mat();
  const Matrix rhs = qerc::linalg::matrix_power(f, 120).mat() *
                     qerc::linalg::matrix_power(f, 80).mat();
  REQUIRE(max_diff(lhs, rhs) < 1e-9);
}

TEST_CASE("period doubling of the ideal crystal", "[reservoir]") {
  // eps=0, D=0: <sigma_z_l>(nT) = (-1)^n <sigma_z_l>(0) for basis states
  DtcParams p = paper_defaults(4);
  p.epsilon = 0.0;
  const UnitaryMatrix f = floquet_operator(p);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
  psi[0b0110] = 1.0;
  const Eigen::VectorXd z0 = [&] {
    Eigen::VectorXd z(4);
    for (int l = 0; l < 4; ++l) z[l] = (0b0110 >> (3 - l)) & 1 ? -1.0 : 1.0;
    return z;
  }();
  for (int n = 1; n <= 20; ++n) {
    psi = f.mat() * psi;
    for (int l = 0; l < 4; ++l) {
      double expect_z = ((n % 2) ? -1.0 : 1.0) * z0[l];
      double z = 0.0;
      for (Eigen::Index idx = 0; idx < 16; ++idx)
        z += std::norm(psi[idx]) * (((idx >> (3 - l)) & 1) ? -1.0 : 1.0);
      REQUIRE(std::abs(z - expect_z) < 1e-10);
    }
  }
}

TEST_CASE("disorder samples are uniform on [0, 2pi)", "[reservoir]") {
  const auto d = sample_disorder(10, RandomSeed{123});
  REQUIRE(d.size() == 10);
  for (double v : d) {
    REQUIRE(v >= 0.0);
    REQUIRE(v < 2.0 * kPi);
  }
  REQUIRE(sample_disorder(10, RandomSeed{123}) == d);

  // moment check over 1e5 draws: mean within 3 sigma of pi, variance within
  // 5% of (2pi)^2/12
  const int n = 100000;
  const auto big = sample_disorder(n, RandomSeed{321});
  double mean = 0.0;
  for (double v : big) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : big) var += (v - mean) * (v - mean);
  var /= n;
  const double ref_var = (2.0 * kPi) * (2.0 * kPi) / 12.0;
  REQUIRE(std::abs(mean - kPi) < 3.0 * std::sqrt(ref_var / n));
  REQUIRE(std::abs(var - ref_var) < 0.05 * ref_var);
}

TEST_CASE("tailed haar injects conjugate pairs into the generator", "[reservoir][slow]") {
  const int n = 64;
  const auto result = tailed_haar_unitary(n, RandomSeed{7});
  REQUIRE(result.pairs.size() == 10);
  std::set<std::pair<int, int>> unique(result.pairs.begin(), result.pairs.end());
  REQUIRE(unique.size() == 10);
  for (const auto& [i, j] : result.pairs) REQUIRE(i < j);

  const auto& g = result.generator.mat();
  const auto w = qerc::netweights::decompose(result.generator);
  for (const auto& [i, j] : result.pairs) {
    REQUIRE(g(i, j).real() >= 0.2);
    REQUIRE(g(i, j).real() < 2.0);
    REQUIRE(g(i, j).imag() >= 0.2);
    REQUIRE(g(i, j).imag() < 2.0);
    REQUIRE(g(j, i) == std::conj(g(i, j)));
    // the a coefficient at the injected pair is the injected real part
    REQUIRE(w.a[qerc::netweights::WeightSet::pair_index(i, j, n)] == g(i, j).real());
  }
  // exp(-iG') is the returned unitary
  REQUIRE((qerc::linalg::exp_neg_i(result.generator).mat() - result.unitary.mat())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("tail injection pushes the generator outside the principal strip", "[reservoir][slow]") {
  // the reason weight analyses must read the constructed generator: the
  // principal log of exp(-iG') wraps and is a different matrix
  const auto result = tailed_haar_unitary(64, RandomSeed{7});
  Eigen::SelfAdjointEigenSolver<Matrix> es(result.generator.mat());
  REQUIRE(es.eigenvalues().cwiseAbs().maxCoeff() > qerc::rng::kPi);
}

TEST_CASE("tailed haar with zero pairs reproduces plain haar", "[reservoir]") {
  const int n = 32;
  const auto result = tailed_haar_unitary(n, RandomSeed{11}, 0);
  const auto plain = qerc::linalg::haar_unitary(n, RandomSeed{11});
  REQUIRE(max_diff(result.unitary.mat(), plain.mat()) < 1e-9);
}

TEST_CASE("spec validation catches inconsistent inputs", "[reservoir]") {
  DtcParams bad = paper_defaults(3);
  bad.disorderT = {0.1, 0.2};  // wrong length
  REQUIRE_THROWS_AS(bad.validate(), qerc::Error);

  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Dtc;
  spec.dtc = paper_defaults(2);
  spec.n_periods = 0;
  REQUIRE_THROWS_AS(spec.validate(), qerc::Error);

  REQUIRE_THROWS_AS(tailed_haar_unitary(8, RandomSeed{1}), qerc::Error);
}

TEST_CASE("build_feature_map dispatches every kind", "[reservoir][slow]") {
  FeatureMapSpec spec;
  spec.dtc = paper_defaults(5);
  spec.n_periods = 3;
  spec.seed = RandomSeed{77};
  for (auto kind : {FeatureMapKind::Dtc, FeatureMapKind::DisorderedDtc, FeatureMapKind::Haar,
                    FeatureMapKind::TailedHaar, FeatureMapKind::Cauchy}) {
    spec.kind = kind;
    const UnitaryMatrix u = build_feature_map(spec);
    REQUIRE(u.dim() == 32);
    REQUIRE(qerc::linalg::unitarity_defect(u.mat()) <= 1e-9);
  }
}

TEST_CASE("disordered dtc differs from the clean dtc", "[reservoir]") {
  FeatureMapSpec spec;
  spec.dtc = paper_defaults(3);
  spec.n_periods = 2;
  spec.seed = RandomSeed{5};
  spec.kind = FeatureMapKind::Dtc;
  const Matrix clean = build_feature_map(spec).mat();
  spec.kind = FeatureMapKind::DisorderedDtc;
  const Matrix disordered = build_feature_map(spec).mat();
  REQUIRE(max_diff(clean, disordered) > 1e-3);
}
