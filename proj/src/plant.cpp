#include "lpvp/plant.hpp"

#include <stdexcept>

namespace lpvp {

namespace {

void check_shape(const AffineMatrixFunction& f, int rows, int cols,
                 int n_rho, const char* name) {
  if (f.rows() != rows || f.cols() != cols) {
    throw std::invalid_argument(std::string("plant: bad shape for ") + name);
  }
  if (f.max_param_index() >= n_rho) {
    throw std::invalid_argument(std::string("plant: ") + name +
                                " references parameter beyond n_rho");
  }
}

}  // namespace

void LpvPlant::validate() const {
  if (n_x <= 0 || n_y <= 0 || n_d <= 0 || n_z <= 0 || n_rho < 0) {
    throw std::invalid_argument("plant: non-positive dimension");
  }
  check_shape(A, n_x, n_x, n_rho, "A");
  check_shape(b, n_x, 1, n_rho, "b");
  check_shape(B_d, n_x, n_d, n_rho, "B_d");
  check_shape(C_y, n_y, n_x, n_rho, "C_y");
  check_shape(d, n_y, 1, n_rho, "d");
  check_shape(D_d, n_y, n_d, n_rho, "D_d");
  check_shape(C_z, n_z, n_x, n_rho, "C_z");
  if (S_d_diag.size() != n_d) {
    throw std::invalid_argument("plant: S_d size mismatch");
  }
  for (Eigen::Index i = 0; i < S_d_diag.size(); ++i) {
    if (!(S_d_diag[i] > 0.0)) {
      throw std::invalid_argument("plant: S_d entries must be positive");
    }
  }
  if (box.dim() != n_rho) {
    throw std::invalid_argument("plant: box dimension != n_rho");
  }
}

void ObserverErrorSystem::frozen(const Vector& rho, Matrix& A,
                                 Matrix& B) const {
  A = A_cl.eval(rho);
  B = B_w.eval(rho);
}

ObserverErrorSystem closed_loop(const LpvPlant& plant, const Matrix& L,
                                const Vector& S_n_diag) {
  plant.validate();
  if (L.rows() != plant.n_x || L.cols() != plant.n_y) {
    throw std::invalid_argument("closed_loop: L must be n_x x n_y");
  }
  if (S_n_diag.size() != plant.n_y) {
    throw std::invalid_argument("closed_loop: S_n size mismatch");
  }
  for (Eigen::Index i = 0; i < S_n_diag.size(); ++i) {
    if (S_n_diag[i] < 0.0) {
      throw std::invalid_argument("closed_loop: S_n entries must be >= 0");
    }
  }
  if (plant.C_z.parameter_dependent()) {
    throw std::invalid_argument(
        "closed_loop: parameter-dependent C_z not supported here");
  }

  ObserverErrorSystem sys;
  sys.L = L;
  sys.S_n_diag = S_n_diag;
  sys.C_z = plant.C_z.constant();
  sys.A_cl = plant.A + plant.C_y.left_multiplied(L);

  // D_w = [D_d S_d, S_n]; the disturbance channel carries no sensor noise,
  // so the plant-side input matrix is [B_d S_d, 0].
  AffineMatrixFunction sn_block(Matrix(S_n_diag.asDiagonal()));
  sys.D_w = AffineMatrixFunction::hstack(
      plant.D_d.right_multiplied(plant.S_d()), sn_block);
  AffineMatrixFunction b_plant = AffineMatrixFunction::hstack(
      plant.B_d.right_multiplied(plant.S_d()),
      AffineMatrixFunction::zero(plant.n_x, plant.n_y));
  sys.B_w = b_plant + sys.D_w.left_multiplied(L);
  return sys;
}

}  // namespace lpvp
