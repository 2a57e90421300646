// Round-trip and oracle criteria (fast): principal-log/exp round trips,
// generator decomposition identity, Floquet half steps against dense
// exponentials, and the classifier gradient against finite differences.

#include <Eigen/Dense>

#include "../oracles.hpp"
#include "harness.hpp"
#include "qerc/qerc.hpp"

using namespace qerc;
using acceptance::fmt;
using linalg::HermitianMatrix;
using linalg::Matrix;
using rng::RandomSeed;

int main() {
  acceptance::Harness h;

  for (int n : {2, 16, 64}) {
    const Matrix g0 =
        oracles::random_hermitian(n, RandomSeed{500 + static_cast<unsigned>(n)}, rng::kPi - 0.1);
    const auto u = linalg::exp_neg_i(HermitianMatrix(g0));
    const double err = (linalg::principal_log_unitary(u).mat() - g0).cwiseAbs().maxCoeff();
    h.check(err <= 1e-8, "log/exp round trip at N=" + std::to_string(n),
            "max error " + fmt(err));
  }

  for (int n : {2, 4, 16}) {
    const Matrix g = oracles::random_hermitian(n, RandomSeed{600 + static_cast<unsigned>(n)}, 2.5);
    const auto w = netweights::decompose(HermitianMatrix(g));
    const double err = (netweights::reconstruct(w).mat() - g).cwiseAbs().maxCoeff();
    const std::size_t coeffs = w.a.size() + w.b.size() + w.c.size();
    h.check(err <= 1e-12 && coeffs == static_cast<std::size_t>(n) * n,
            "generator decompose/reconstruct at N=" + std::to_string(n),
            "max error " + fmt(err) + ", " + std::to_string(coeffs) + " coefficients");
  }

  for (int L : {2, 3}) {
    reservoir::DtcParams p;
    p.L = L;
    p.epsilon = 0.21;
    p.disorderT = reservoir::sample_disorder(L, RandomSeed{700 + static_cast<unsigned>(L)});

    Matrix h1 = Matrix::Zero(p.dim(), p.dim());
    for (int l = 0; l < L; ++l) h1 += oracles::pauli_on('x', l, L);
    h1 *= p.gT * (1.0 - p.epsilon) / 2.0;
    const double err1 =
        (reservoir::h1_half_step(p).mat() - oracles::exp_neg_i_taylor(h1, 120)).cwiseAbs().maxCoeff();
    h.check(err1 <= 1e-12, "H1 half step vs dense exponential at L=" + std::to_string(L),
            "max error " + fmt(err1));

    Matrix h2 = Matrix::Zero(p.dim(), p.dim());
    for (int l = 0; l < L; ++l) {
      for (int m = l + 1; m < L; ++m)
        h2 += (p.J0T / std::pow(m - l, p.alpha)) *
              (oracles::pauli_on('z', l, L) * oracles::pauli_on('z', m, L));
      h2 += p.disorder(l) * oracles::pauli_on('z', l, L);
    }
    h2 /= 2.0;
    const double err2 =
        (reservoir::h2_half_step(p).mat() - oracles::exp_neg_i_taylor(h2, 120)).cwiseAbs().maxCoeff();
    h.check(err2 <= 1e-12, "H2 half step vs dense exponential at L=" + std::to_string(L),
            "max error " + fmt(err2));
  }

  {
    rng::SplitMix64 gen(RandomSeed{800});
    const Eigen::Index n = 10, dim = 6;
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = gen.next_open01();
    std::vector<int> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = static_cast<int>(gen.next_below(10));
    pipeline::OnnParams p = pipeline::OnnParams::zeros(dim);
    for (Eigen::Index i = 0; i < p.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < dim; ++j) p.weights(i, j) = 0.4 * gen.next_normal();
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias[i] = 0.4 * gen.next_normal();

    const auto grad = pipeline::onn_gradient(x, y, p);
    const double step = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < dim; ++j) {
        pipeline::OnnParams plus = p, minus = p;
        plus.weights(i, j) += step;
        minus.weights(i, j) -= step;
        const double fd = (pipeline::cross_entropy_loss(x, y, plus) -
                           pipeline::cross_entropy_loss(x, y, minus)) /
                          (2 * step);
        worst = std::max(worst, std::abs(grad.weights(i, j) - fd));
    }
    const double rel = worst / grad.weights.cwiseAbs().maxCoeff();
    h.check(rel <= 1e-6, "ONN gradient vs central finite differences",
            "relative error " + fmt(rel));
  }

  return h.finish();
}
