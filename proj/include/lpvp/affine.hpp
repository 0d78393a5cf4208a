#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace lpvp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix-valued affine map M(rho) = M0 + sum_i rho[i] * M_i.
///
/// The basis list stores one coefficient matrix per parameter index; indices
/// are unique and the coefficient shapes all match the constant part.
class AffineMatrixFunction {
 public:
  AffineMatrixFunction() = default;
  explicit AffineMatrixFunction(Matrix constant);

  static AffineMatrixFunction zero(Eigen::Index rows, Eigen::Index cols);

  /// Adds rho[param_index] * coeff to the map. Throws if the index is
  /// already present or the shape differs from the constant part.
  void add_basis(int param_index, Matrix coeff);

  Eigen::Index rows() const { return constant_.rows(); }
  Eigen::Index cols() const { return constant_.cols(); }
  const Matrix& constant() const { return constant_; }
  const std::vector<std::pair<int, Matrix>>& basis() const { return basis_; }

  /// Largest parameter index referenced, or -1 for a constant map.
  int max_param_index() const;
  bool parameter_dependent() const { return !basis_.empty(); }

  /// Evaluates the exact linear combination. rho must cover every index.
  Matrix eval(const Vector& rho) const;

  /// left * M(rho) and M(rho) * right with constant factors; affine
  /// structure is preserved.
  AffineMatrixFunction left_multiplied(const Matrix& left) const;
  AffineMatrixFunction right_multiplied(const Matrix& right) const;

  AffineMatrixFunction operator+(const AffineMatrixFunction& other) const;

  /// Horizontal concatenation [a(rho), b(rho)].
  static AffineMatrixFunction hstack(const AffineMatrixFunction& a,
                                     const AffineMatrixFunction& b);

 private:
  Matrix constant_{0, 0};
  std::vector<std::pair<int, Matrix>> basis_;  // sorted by parameter index
};

/// Axis-aligned box of admissible parameter values.
struct ParameterBox {
  Vector lower;
  Vector upper;

  ParameterBox() = default;
  ParameterBox(Vector lo, Vector hi);

  Eigen::Index dim() const { return lower.size(); }
  bool degenerate(Eigen::Index i) const { return lower[i] == upper[i]; }

  /// 2^k corners for k non-degenerate coordinates.
  std::size_t vertex_count() const;

  /// Corner points in binary-counting order: the first non-degenerate
  /// coordinate toggles fastest; degenerate coordinates stay at their
  /// single value.
  std::vector<Vector> vertices() const;

  bool contains(const Vector& rho, double tol = 0.0) const;
};

/// Uniform samples from the interior of the box (deterministic in seed).
std::vector<Vector> sample_box(const ParameterBox& box, int count,
                               std::uint64_t seed);

}  // namespace lpvp
