#pragma once

#include "lpvp/affine.hpp"

#include <string>
#include <vector>

namespace lpvp {

enum class VarKind { Symmetric, Rectangular, Diagonal, Scalar };

/// Matrix decision variable occupying a contiguous slice of the flat
/// decision vector. Packing conventions:
///   Symmetric n:   upper triangle, column-major: (0,0), (0,1), (1,1), ...
///   Rectangular:   row-major
///   Diagonal n:    diagonal entries
///   Scalar:        one entry
struct MatrixVar {
  int id = -1;
  std::string name;
  VarKind kind = VarKind::Scalar;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int dim = 0;
};

/// One affine contribution to a symmetric block:
///   SymPair:     coeff * (left * op(V) * right + transposed partner)
///   Congruence:  coeff * left * V * left^T     (V symmetric/diagonal/scalar)
struct LmiTerm {
  enum class Mode { SymPair, Congruence };
  Mode mode = Mode::SymPair;
  int var_id = -1;
  Matrix left;
  Matrix right;  // unused for Congruence
  double coeff = 1.0;
  bool transpose_var = false;
};

/// Symmetric-by-construction affine matrix expression, constrained
/// negative definite. Constants accumulate separately from variable terms.
class LmiBlock {
 public:
  explicit LmiBlock(int size);

  int size() const { return size_; }

  /// Adds M at block offset (r0, c0); off-diagonal placements get the
  /// transposed partner automatically, diagonal placements require
  /// symmetric M.
  void add_constant(int r0, int c0, const Matrix& M);

  /// coeff * (left * op(V) * right) plus its transpose.
  void add_sym(const MatrixVar& v, const Matrix& left, const Matrix& right,
               double coeff = 1.0, bool transpose_var = false);

  /// coeff * left * V * left^T for a symmetric-kind variable.
  void add_congruence(const MatrixVar& v, const Matrix& left,
                      double coeff = 1.0);

  const Matrix& constant_part() const { return constant_; }
  const std::vector<LmiTerm>& terms() const { return terms_; }

  /// Selector embedding: identity rows r0..r0+rows-1 of a size x rows map.
  Matrix selector(int r0, int rows) const;

 private:
  int size_;
  Matrix constant_;
  std::vector<LmiTerm> terms_;
};

/// Solver-neutral standard form. Each PSD block means
///   G0 + sum_k x_k G_k <= -eps I   (negative semidefinite with margin)
/// nonneg indices mean x_i >= eps, linear constraints row^T x <= bound - eps.
struct VectorizedBlock {
  Matrix G0;
  std::vector<std::pair<int, Matrix>> slopes;  // (decision index, symmetric slope)

  Matrix eval(const Vector& x) const;
  double max_eigenvalue(const Vector& x) const;
};

struct LinearConstraint {
  Vector row;
  double bound = 0.0;
};

struct SdpProblem {
  int n_vars = 0;
  Vector objective;
  std::vector<VectorizedBlock> psd_blocks;
  std::vector<int> nonneg_indices;
  std::vector<LinearConstraint> linear_constraints;
  double strictness_epsilon = 1e-8;
};

enum class NormOrder { L1, L2, Linf };

/// Declares variables, collects blocks and scalar constraints, and
/// vectorizes everything into an SdpProblem. Variables pack in declaration
/// order, so certificates are reproducible across runs.
class LmiProblem {
 public:
  MatrixVar symmetric(const std::string& name, int n);
  MatrixVar rectangular(const std::string& name, int rows, int cols);
  MatrixVar diagonal(const std::string& name, int n);
  MatrixVar scalar(const std::string& name);

  int num_scalars() const { return next_offset_; }
  const std::vector<MatrixVar>& variables() const { return vars_; }

  LmiBlock& add_block(int size, std::string label = {});
  const std::vector<std::string>& block_labels() const { return labels_; }

  /// V > 0 as a dedicated block -V <= -eps I.
  void require_positive_definite(const MatrixVar& v);
  /// Elementwise floor x_i >= eps on the variable's scalars.
  void require_nonnegative(const MatrixVar& v);
  /// row^T x <= bound (strict; eps applied at solve time).
  void add_linear_le(const Vector& row, double bound, std::string label = {});

  void set_objective(const Vector& c);
  /// ||v||_p objective for a nonnegative vector variable. p=1 sums the
  /// entries; p=2 and p=inf add one epigraph scalar t.
  void set_norm_objective(const MatrixVar& v, NormOrder p);

  SdpProblem vectorize(double eps) const;

  /// Reshapes a solved decision vector back to matrix form.
  Matrix extract(const Vector& x, const MatrixVar& v) const;
  /// Inverse of extract, used for round-trip checks.
  Vector pack(const Matrix& M, const MatrixVar& v) const;

  /// Unit matrix of one scalar component of the variable.
  static Matrix unit_component(const MatrixVar& v, int local_index);

  const std::vector<std::string>& linear_labels() const {
    return linear_labels_;
  }
  const std::vector<LinearConstraint>& linear_constraints() const {
    return linear_;
  }

 private:
  MatrixVar& declare(VarKind kind, const std::string& name, int rows,
                     int cols, int dim);

  std::vector<MatrixVar> vars_;
  std::vector<LmiBlock> blocks_;
  std::vector<std::string> labels_;
  std::vector<int> nonneg_;
  std::vector<LinearConstraint> linear_;
  std::vector<std::string> linear_labels_;
  Vector objective_;
  int next_offset_ = 0;
};

}  // namespace lpvp
