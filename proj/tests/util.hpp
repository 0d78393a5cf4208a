#pragma once

#include "lpvp/plant.hpp"

#include <random>

namespace lpvp::testing {

inline Matrix m1x1(double v) { return Matrix::Constant(1, 1, v); }

/// Scalar LTI plant with no parameter dependence (empty box).
inline LpvPlant scalar_plant(double a, double b_d = 1.0, double c_y = 1.0,
                             double d_d = 0.0, double c_z = 1.0,
                             double s_d = 1.0) {
  LpvPlant plant;
  plant.n_x = plant.n_y = plant.n_d = plant.n_z = 1;
  plant.n_rho = 0;
  plant.A = AffineMatrixFunction(m1x1(a));
  plant.b = AffineMatrixFunction(m1x1(0.0));
  plant.B_d = AffineMatrixFunction(m1x1(b_d));
  plant.C_y = AffineMatrixFunction(m1x1(c_y));
  plant.d = AffineMatrixFunction(m1x1(0.0));
  plant.D_d = AffineMatrixFunction(m1x1(d_d));
  plant.C_z = AffineMatrixFunction(m1x1(c_z));
  plant.S_d_diag = Vector::Constant(1, s_d);
  plant.box = ParameterBox(Vector(0), Vector(0));
  plant.validate();
  return plant;
}

/// Two-state LTI plant: double integrator driven by one disturbance,
/// both states measured, position+velocity of interest.
inline LpvPlant two_state_plant(double s_d = 1.0) {
  LpvPlant plant;
  plant.n_x = 2;
  plant.n_y = 2;
  plant.n_d = 1;
  plant.n_z = 2;
  plant.n_rho = 0;
  Matrix A(2, 2);
  A << 0, 1, 0, 0;
  plant.A = AffineMatrixFunction(A);
  plant.b = AffineMatrixFunction::zero(2, 1);
  Matrix Bd(2, 1);
  Bd << 0, 1;
  plant.B_d = AffineMatrixFunction(Bd);
  plant.C_y = AffineMatrixFunction(Matrix::Identity(2, 2));
  plant.d = AffineMatrixFunction::zero(2, 1);
  plant.D_d = AffineMatrixFunction::zero(2, 1);
  plant.C_z = AffineMatrixFunction(Matrix::Identity(2, 2));
  plant.S_d_diag = Vector::Constant(1, s_d);
  plant.box = ParameterBox(Vector(0), Vector(0));
  plant.validate();
  return plant;
}

/// Two-state plant with genuine parameter dependence on a 1-D box.
inline LpvPlant lpv_toy_plant() {
  LpvPlant plant;
  plant.n_x = 2;
  plant.n_y = 1;
  plant.n_d = 1;
  plant.n_z = 1;
  plant.n_rho = 1;
  Matrix A0(2, 2);
  A0 << 0, 1, -1, -0.4;
  plant.A = AffineMatrixFunction(A0);
  Matrix A1 = Matrix::Zero(2, 2);
  A1(1, 0) = 0.5;  // stiffness varies with the parameter
  plant.A.add_basis(0, A1);
  plant.b = AffineMatrixFunction::zero(2, 1);
  Matrix Bd(2, 1);
  Bd << 0, 1;
  plant.B_d = AffineMatrixFunction(Bd);
  Matrix Cy(1, 2);
  Cy << 1, 0;
  plant.C_y = AffineMatrixFunction(Cy);
  plant.d = AffineMatrixFunction::zero(1, 1);
  plant.D_d = AffineMatrixFunction::zero(1, 1);
  Matrix Cz(1, 2);
  Cz << 1, 0;
  plant.C_z = AffineMatrixFunction(Cz);
  plant.S_d_diag = Vector::Constant(1, 1.0);
  plant.box = ParameterBox(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  plant.validate();
  return plant;
}

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols,
                            double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = dist(rng);
  }
  return M;
}

/// Random Hurwitz matrix with comfortably damped modes.
inline Matrix random_stable(std::mt19937_64& rng, int n, double margin = 0.4) {
  Matrix A = random_matrix(rng, n, n);
  Eigen::EigenSolver<Matrix> eig(A, false);
  const double shift = eig.eigenvalues().real().maxCoeff();
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  A -= (shift + margin * std::max(1.0, scale)) * Matrix::Identity(n, n);
  return A;
}

}  // namespace lpvp::testing
