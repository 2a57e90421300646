#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qerc/errors.hpp"
#include "qerc/rng.hpp"

#ifdef QERC_USE_LAPACKE
#include <lapacke.h>
#endif

namespace qerc::linalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;  // dense square complex carrier
using Vector = Eigen::VectorXcd;

using rng::kPi;
using rng::RandomSeed;
using rng::SplitMix64;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Kronecker product; the left factor carries the higher-significance index.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// ||U^H U - I||_max
inline double unitarity_defect(const Matrix& u) {
  Matrix d = u.adjoint() * u;
  d.diagonal().array() -= 1.0;
  return max_abs(d);
}

/// ||G - G^H||_max
inline double hermiticity_defect(const Matrix& g) {
  return max_abs(g - g.adjoint());
}

/// Unitary within 1e-10 (max-norm of U^H U - I), checked on construction.
class UnitaryMatrix {
 public:
  static constexpr double kDefaultTol = 1e-10;

  explicit UnitaryMatrix(Matrix m, double tol = kDefaultTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw NonUnitaryInput("UnitaryMatrix: matrix must be square and nonempty");
    if (!m_.allFinite()) throw NonUnitaryInput("UnitaryMatrix: entries must be finite");
    const double defect = unitarity_defect(m_);
    if (!(defect <= tol))
      throw NonUnitaryInput("UnitaryMatrix: ||U^H U - I||_max = " + std::to_string(defect) +
                            " exceeds tolerance " + std::to_string(tol));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

/// Hermitian within 1e-12 (max-norm of G - G^H), checked on construction.
class HermitianMatrix {
 public:
  static constexpr double kDefaultTol = 1e-12;

  explicit HermitianMatrix(Matrix m, double tol = kDefaultTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw NonHermitianInput("HermitianMatrix: matrix must be square and nonempty");
    if (!m_.allFinite()) throw NonHermitianInput("HermitianMatrix: entries must be finite");
    const double defect = hermiticity_defect(m_);
    if (!(defect <= tol))
      throw NonHermitianInput("HermitianMatrix: ||G - G^H||_max = " + std::to_string(defect) +
                              " exceeds tolerance " + std::to_string(tol));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

namespace detail {

/// Schur factorization U = Q T Q^H of a (normal) unitary matrix, returning Q
/// and the diagonal of T. For normal input the strictly upper part of T is
/// O(machine epsilon) and is discarded.
inline std::pair<Matrix, Vector> schur_unitary(const Matrix& u) {
#ifdef QERC_USE_LAPACKE
  const int n = static_cast<int>(u.rows());
  Matrix t = u;  // overwritten with the triangular factor
  Matrix q(n, n);
  std::vector<Complex> w(static_cast<std::size_t>(n));
  int sdim = 0;
  const int info = LAPACKE_zgees(
      LAPACK_COL_MAJOR, 'V', 'N', nullptr, n,
      reinterpret_cast<lapack_complex_double*>(t.data()), n, &sdim,
      reinterpret_cast<lapack_complex_double*>(w.data()),
      reinterpret_cast<lapack_complex_double*>(q.data()), n);
  if (info != 0)
    throw Error("schur_unitary: LAPACKE_zgees failed with info=" + std::to_string(info));
  return {std::move(q), Eigen::Map<const Vector>(w.data(), n)};
#else
  Eigen::ComplexSchur<Matrix> schur(u, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw Error("schur_unitary: ComplexSchur did not converge");
  return {schur.matrixU(), schur.matrixT().diagonal()};
#endif
}

}  // namespace detail

/// Eigenphases arg(lambda_j) in (-pi, pi] of a unitary matrix, in the order
/// produced by the Schur factorization.
inline Eigen::VectorXd unitary_eigenphases(const UnitaryMatrix& u) {
  auto [q, lambda] = detail::schur_unitary(u.mat());
  Eigen::VectorXd phases(lambda.size());
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    phases[j] = std::atan2(lambda[j].imag(), lambda[j].real());
  return phases;
}

/// Hermitian generator G = i log(U) of the principal branch, so U = exp(-iG)
/// and every eigenvalue of G lies in (-pi, pi).
///
/// Unitary matrices are normal, so G is assembled from the Schur form: the
/// diagonal of T carries the eigenvalues e^{i theta_j}, each phase is mapped
/// through atan2 and negated, and the result is Hermitized as (G + G^H)/2.
///
/// The principal branch is undefined on the negative real line. An eigenvalue
/// whose phase is within 1e-9 of +-pi raises NegativeRealEigenvalue unless
/// clamp_negative_real is set, in which case its generator phase is pinned
/// to pi.
inline HermitianMatrix principal_log_unitary(const UnitaryMatrix& u,
                                             bool clamp_negative_real = false) {
  static constexpr double kBranchTol = 1e-9;
  auto [q, lambda] = detail::schur_unitary(u.mat());
  const Eigen::Index n = lambda.size();
  Eigen::VectorXd mu(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double theta = std::atan2(lambda[j].imag(), lambda[j].real());
    if (kPi - std::abs(theta) < kBranchTol) {
      if (!clamp_negative_real)
        throw NegativeRealEigenvalue(
            "principal_log_unitary: eigenvalue " + std::to_string(j) +
            " has phase " + std::to_string(theta) + " within 1e-9 of the branch cut");
      mu[j] = kPi;
    } else {
      mu[j] = -theta;
    }
  }
  Matrix g = q * mu.asDiagonal() * q.adjoint();
  g = ((g + g.adjoint()) / 2.0).eval();  // exactly Hermitian
  return HermitianMatrix(std::move(g));
}

/// U = exp(-iG) for Hermitian G, via the spectral decomposition. Diagonal
/// input short-circuits to the elementwise exponential.
inline UnitaryMatrix exp_neg_i(const HermitianMatrix& g) {
  const Matrix& m = g.mat();
  const Eigen::Index n = m.rows();

  bool diagonal = true;
  for (Eigen::Index j = 0; j < n && diagonal; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Matrix u = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      u(j, j) = std::exp(Complex(0.0, -m(j, j).real()));
    return UnitaryMatrix(std::move(u));
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw Error("exp_neg_i: eigendecomposition did not converge");
  Vector phase(n);
  for (Eigen::Index j = 0; j < n; ++j)
    phase[j] = std::exp(Complex(0.0, -es.eigenvalues()[j]));
  Matrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  return UnitaryMatrix(std::move(u));
}

/// Haar-distributed unitary via QR of an i.i.d. complex Gaussian matrix with
/// the R-diagonal phase correction (Mezzadri). Deterministic per seed.
inline UnitaryMatrix haar_unitary(int n, RandomSeed seed) {
  if (n < 1) throw Error("haar_unitary: dimension must be >= 1");
  SplitMix64 gen(seed);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gen.next_complex_normal();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Vector phase(n);
  for (int j = 0; j < n; ++j) {
    const Complex r = qr.matrixQR()(j, j);
    const double mag = std::abs(r);
    phase[j] = mag > 0.0 ? r / mag : Complex(1.0, 0.0);
  }
  return UnitaryMatrix(q * phase.asDiagonal());
}

/// Cauchy-random unitary exp(-iB), where B = (A + A^H)/2 and each entry of A
/// has independent Cauchy(gamma) real and imaginary parts.
inline UnitaryMatrix cauchy_unitary(int n, double gamma, RandomSeed seed) {
  if (n < 1) throw Error("cauchy_unitary: dimension must be >= 1");
  if (!(gamma > 0.0)) throw Error("cauchy_unitary: gamma must be positive");
  SplitMix64 gen(seed);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = Complex(gen.next_cauchy(gamma), gen.next_cauchy(gamma));
  Matrix b = ((a + a.adjoint()) / 2.0).eval();
  return exp_neg_i(HermitianMatrix(std::move(b)));
}

/// U^n by binary exponentiation of dense products. No re-orthonormalization;
/// the result is re-validated at 1e-9 so unitarity drift is caught.
inline UnitaryMatrix matrix_power(const UnitaryMatrix& u, int n) {
  if (n < 1) throw Error("matrix_power: exponent must be >= 1");
  if (n == 1) return u;
  Matrix base = u.mat();
  Matrix result = Matrix::Identity(u.dim(), u.dim());
  unsigned e = static_cast<unsigned>(n);
  while (e > 0) {
    if (e & 1u) result = (result * base).eval();
    e >>= 1u;
    if (e > 0) base = (base * base).eval();
  }
  return UnitaryMatrix(std::move(result), 1e-9);
}

}  // namespace qerc::linalg
