#pragma once

#include "lpvp/affine.hpp"

namespace lpvp {

/// Affine parameter-varying plant
///
///   x' = A(rho) x + b(rho) + B_d(rho) S_d dbar
///   y  = C_y(rho) x + d(rho) + D_d(rho) S_d dbar + n
///   z  = C_z x
///
/// S_d scales the normalized disturbance to physical units. C_z is constant
/// in the default model; an affine C_z is accepted for generality.
struct LpvPlant {
  int n_x = 0;
  int n_y = 0;
  int n_d = 0;
  int n_z = 0;
  int n_rho = 0;

  AffineMatrixFunction A;    // n_x x n_x
  AffineMatrixFunction b;    // n_x x 1
  AffineMatrixFunction B_d;  // n_x x n_d
  AffineMatrixFunction C_y;  // n_y x n_x
  AffineMatrixFunction d;    // n_y x 1
  AffineMatrixFunction D_d;  // n_y x n_d
  AffineMatrixFunction C_z;  // n_z x n_x
  Vector S_d_diag;           // strictly positive, length n_d
  ParameterBox box;

  Matrix S_d() const { return S_d_diag.asDiagonal(); }

  /// Throws std::invalid_argument when shapes, counts or S_d violate the
  /// declared dimensions.
  void validate() const;
};

/// Observer error dynamics for a gain L and noise scaling S_n:
///
///   e' = (A(rho) + L C_y(rho)) e + ([B_d S_d, 0] + L [D_d S_d, S_n]) wbar
///   eps = C_z e
struct ObserverErrorSystem {
  AffineMatrixFunction A_cl;  // n_x x n_x
  AffineMatrixFunction B_w;   // n_x x (n_d + n_y), assembled input matrix
  AffineMatrixFunction D_w;   // n_y x (n_d + n_y), plant-side [D_d S_d, S_n]
  Matrix C_z;
  Matrix L;
  Vector S_n_diag;

  /// Frozen-parameter LTI realization of wbar -> eps (D term is zero).
  void frozen(const Vector& rho, Matrix& A, Matrix& B) const;
};

/// Builds the error system. Requires a constant C_z.
ObserverErrorSystem closed_loop(const LpvPlant& plant, const Matrix& L,
                                const Vector& S_n_diag);

}  // namespace lpvp
