#include "lpvp/norms.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace lpvp {

namespace {
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;
}  // namespace

double spectral_abscissa(const Matrix& A) {
  Eigen::EigenSolver<Matrix> eig(A, /*computeEigenvectors=*/false);
  return eig.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& A, double margin) {
  return spectral_abscissa(A) < -margin;
}

Matrix lyapunov_solve(const Matrix& A, const Matrix& W) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || W.rows() != n || W.cols() != n) {
    throw std::invalid_argument("lyapunov: shape mismatch");
  }
  Eigen::ComplexSchur<Matrix> schur(A);
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("lyapunov: Schur decomposition failed");
  }
  const ComplexMatrix U = schur.matrixU();
  const ComplexMatrix T = schur.matrixT();
  const ComplexMatrix Wt = U.adjoint() * W * U;

  // T Pt + Pt T^H = -Wt, T upper triangular; back-substitute from the
  // bottom-right corner. Solvable because no two eigenvalues are mirrored
  // across the imaginary axis (A Hurwitz).
  ComplexMatrix Pt = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      Complex rhs = -Wt(i, j);
      for (Eigen::Index k = i + 1; k < n; ++k) rhs -= T(i, k) * Pt(k, j);
      for (Eigen::Index k = j + 1; k < n; ++k) {
        rhs -= Pt(i, k) * std::conj(T(j, k));
      }
      const Complex denom = T(i, i) + std::conj(T(j, j));
      if (std::abs(denom) < 1e-300) {
        throw std::domain_error("lyapunov: singular Sylvester operator");
      }
      Pt(i, j) = rhs / denom;
    }
  }
  const ComplexMatrix P = U * Pt * U.adjoint();
  Matrix out = P.real();
  return 0.5 * (out + out.transpose());
}

double h2_norm(const Matrix& A, const Matrix& B, const Matrix& C) {
  if (!is_hurwitz(A)) {
    throw std::domain_error("h2_norm: A is not Hurwitz");
  }
  const Matrix P = lyapunov_solve(A, B * B.transpose());
  const double val = (C * P * C.transpose()).trace();
  return std::sqrt(std::max(0.0, val));
}

double frequency_gain(const Matrix& A, const Matrix& B, const Matrix& C,
                      const Matrix& D, double omega) {
  const Eigen::Index n = A.rows();
  ComplexMatrix M = -A.cast<Complex>();
  for (Eigen::Index i = 0; i < n; ++i) M(i, i) += Complex(0.0, omega);
  const ComplexMatrix X = M.partialPivLu().solve(B.cast<Complex>());
  const ComplexMatrix G = C.cast<Complex>() * X + D.cast<Complex>();
  Eigen::JacobiSVD<ComplexMatrix> svd(G);
  return svd.singularValues().maxCoeff();
}

namespace {

bool hamiltonian_has_imaginary_eig(const Matrix& A, const Matrix& B,
                                   const Matrix& C, const Matrix& D,
                                   double gamma) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  const Eigen::Index p = C.rows();
  Matrix R = gamma * gamma * Matrix::Identity(m, m) - D.transpose() * D;
  const Matrix Rinv = R.llt().solve(Matrix::Identity(m, m));
  const Matrix M11 = A + B * Rinv * D.transpose() * C;
  Matrix H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = M11;
  H.topRightCorner(n, n) = B * Rinv * B.transpose();
  H.bottomLeftCorner(n, n) =
      -C.transpose() * (Matrix::Identity(p, p) + D * Rinv * D.transpose()) * C;
  H.bottomRightCorner(n, n) = -M11.transpose();

  Eigen::EigenSolver<Matrix> eig(H, /*computeEigenvectors=*/false);
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const Complex lambda = eig.eigenvalues()[i];
    if (std::abs(lambda.real()) <= 1e-9 * (1.0 + std::abs(lambda))) {
      return true;
    }
  }
  return false;
}

}  // namespace

double hinf_norm(const Matrix& A, const Matrix& B, const Matrix& C,
                 const Matrix& D, double rel_tol) {
  if (!is_hurwitz(A)) {
    throw std::domain_error("hinf_norm: A is not Hurwitz");
  }
  Eigen::JacobiSVD<Matrix> dsvd(D);
  const double sigma_d =
      D.size() == 0 || D.isZero(0.0) ? 0.0 : dsvd.singularValues().maxCoeff();
  if (B.isZero(0.0) || C.isZero(0.0)) return sigma_d;

  // Seed the lower bound with achieved gains: DC, a log-spaced sweep, and
  // the resonant frequencies of A.
  double lo = std::max(sigma_d, frequency_gain(A, B, C, D, 0.0));
  Eigen::EigenSolver<Matrix> eig(A, false);
  const double wscale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  for (int k = 0; k <= 24; ++k) {
    const double omega = wscale * std::pow(10.0, -3.0 + 0.25 * k);
    lo = std::max(lo, frequency_gain(A, B, C, D, omega));
  }
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double omega = std::abs(eig.eigenvalues()[i].imag());
    if (omega > 0.0) lo = std::max(lo, frequency_gain(A, B, C, D, omega));
  }
  if (lo <= 0.0) return 0.0;

  double hi = 2.0 * lo;
  int grow = 0;
  while (hamiltonian_has_imaginary_eig(A, B, C, D, hi)) {
    hi *= 2.0;
    if (++grow > 64) {
      throw std::runtime_error("hinf_norm: bisection bracket failure");
    }
  }
  while (hi - lo > rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (hamiltonian_has_imaginary_eig(A, B, C, D, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lpvp
