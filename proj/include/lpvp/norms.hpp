#pragma once

#include "lpvp/affine.hpp"

namespace lpvp {

/// Largest real part over the spectrum of A.
double spectral_abscissa(const Matrix& A);

bool is_hurwitz(const Matrix& A, double margin = 0.0);

/// Solves A P + P A^T + W = 0 for Hurwitz A and symmetric W via complex
/// Schur reduction and triangular back-substitution.
Matrix lyapunov_solve(const Matrix& A, const Matrix& W);

/// H2 norm sqrt(trace(C P C^T)) with P the controllability Gramian.
/// Throws std::domain_error when A is not Hurwitz.
double h2_norm(const Matrix& A, const Matrix& B, const Matrix& C);

/// sigma_max(C (jw I - A)^{-1} B + D) at a single frequency.
double frequency_gain(const Matrix& A, const Matrix& B, const Matrix& C,
                      const Matrix& D, double omega);

/// H-infinity norm by bisection on the Hamiltonian imaginary-eigenvalue
/// test, to the given relative tolerance.
double hinf_norm(const Matrix& A, const Matrix& B, const Matrix& C,
                 const Matrix& D, double rel_tol = 1e-6);

}  // namespace lpvp
