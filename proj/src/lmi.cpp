#include "lpvp/lmi.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace lpvp {

namespace {

Matrix exact_symmetrize(const Matrix& M) {
  return 0.5 * (M + M.transpose());
}

}  // namespace

LmiBlock::LmiBlock(int size)
    : size_(size), constant_(Matrix::Zero(size, size)) {
  if (size <= 0) throw std::invalid_argument("lmi block: size must be > 0");
}

Matrix LmiBlock::selector(int r0, int rows) const {
  if (r0 < 0 || r0 + rows > size_) {
    throw std::invalid_argument("lmi block: selector out of range");
  }
  Matrix E = Matrix::Zero(size_, rows);
  E.block(r0, 0, rows, rows).setIdentity();
  return E;
}

void LmiBlock::add_constant(int r0, int c0, const Matrix& M) {
  if (r0 < 0 || c0 < 0 || r0 + M.rows() > size_ || c0 + M.cols() > size_) {
    throw std::invalid_argument("lmi block: constant placement out of range");
  }
  if (r0 == c0) {
    if (M.rows() != M.cols() ||
        (M - M.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * (1.0 + M.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument(
          "lmi block: diagonal constant must be symmetric");
    }
    constant_.block(r0, c0, M.rows(), M.cols()) += exact_symmetrize(M);
  } else {
    constant_.block(r0, c0, M.rows(), M.cols()) += M;
    constant_.block(c0, r0, M.cols(), M.rows()) += M.transpose();
  }
}

void LmiBlock::add_sym(const MatrixVar& v, const Matrix& left,
                       const Matrix& right, double coeff, bool transpose_var) {
  const Eigen::Index vr = transpose_var ? v.cols : v.rows;
  const Eigen::Index vc = transpose_var ? v.rows : v.cols;
  if (left.rows() != size_ || left.cols() != vr || right.rows() != vc ||
      right.cols() != size_) {
    throw std::invalid_argument("lmi block: sym term shape mismatch");
  }
  LmiTerm term;
  term.mode = LmiTerm::Mode::SymPair;
  term.var_id = v.id;
  term.left = left;
  term.right = right;
  term.coeff = coeff;
  term.transpose_var = transpose_var;
  terms_.push_back(std::move(term));
}

void LmiBlock::add_congruence(const MatrixVar& v, const Matrix& left,
                              double coeff) {
  if (v.kind == VarKind::Rectangular) {
    throw std::invalid_argument(
        "lmi block: congruence requires a symmetric-valued variable");
  }
  if (left.rows() != size_ || left.cols() != v.rows) {
    throw std::invalid_argument("lmi block: congruence shape mismatch");
  }
  LmiTerm term;
  term.mode = LmiTerm::Mode::Congruence;
  term.var_id = v.id;
  term.left = left;
  term.coeff = coeff;
  terms_.push_back(std::move(term));
}

Matrix VectorizedBlock::eval(const Vector& x) const {
  Matrix M = G0;
  for (const auto& [k, G] : slopes) M.noalias() += x[k] * G;
  return M;
}

double VectorizedBlock::max_eigenvalue(const Vector& x) const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(eval(x),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

MatrixVar& LmiProblem::declare(VarKind kind, const std::string& name,
                               int rows, int cols, int dim) {
  MatrixVar v;
  v.id = static_cast<int>(vars_.size());
  v.name = name;
  v.kind = kind;
  v.rows = rows;
  v.cols = cols;
  v.offset = next_offset_;
  v.dim = dim;
  next_offset_ += dim;
  vars_.push_back(std::move(v));
  return vars_.back();
}

MatrixVar LmiProblem::symmetric(const std::string& name, int n) {
  if (n <= 0) throw std::invalid_argument("symmetric var: n must be > 0");
  return declare(VarKind::Symmetric, name, n, n, n * (n + 1) / 2);
}

MatrixVar LmiProblem::rectangular(const std::string& name, int rows,
                                  int cols) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("rectangular var: bad shape");
  }
  return declare(VarKind::Rectangular, name, rows, cols, rows * cols);
}

MatrixVar LmiProblem::diagonal(const std::string& name, int n) {
  if (n <= 0) throw std::invalid_argument("diagonal var: n must be > 0");
  return declare(VarKind::Diagonal, name, n, n, n);
}

MatrixVar LmiProblem::scalar(const std::string& name) {
  return declare(VarKind::Scalar, name, 1, 1, 1);
}

LmiBlock& LmiProblem::add_block(int size, std::string label) {
  blocks_.emplace_back(size);
  labels_.push_back(label.empty()
                        ? "block" + std::to_string(blocks_.size() - 1)
                        : std::move(label));
  return blocks_.back();
}

void LmiProblem::require_positive_definite(const MatrixVar& v) {
  if (v.kind == VarKind::Rectangular) {
    throw std::invalid_argument("positive definite: symmetric-valued only");
  }
  LmiBlock& blk = add_block(v.rows, v.name + "_pd");
  blk.add_congruence(v, Matrix::Identity(v.rows, v.rows), -1.0);
}

void LmiProblem::require_nonnegative(const MatrixVar& v) {
  for (int k = 0; k < v.dim; ++k) nonneg_.push_back(v.offset + k);
}

void LmiProblem::add_linear_le(const Vector& row, double bound,
                               std::string label) {
  linear_.push_back({row, bound});
  linear_labels_.push_back(label.empty()
                               ? "lin" + std::to_string(linear_.size() - 1)
                               : std::move(label));
}

void LmiProblem::set_objective(const Vector& c) { objective_ = c; }

void LmiProblem::set_norm_objective(const MatrixVar& v, NormOrder p) {
  const int n = v.dim;
  switch (p) {
    case NormOrder::L1: {
      Vector c = Vector::Zero(next_offset_);
      for (int k = 0; k < n; ++k) c[v.offset + k] = 1.0;
      objective_ = c;
      break;
    }
    case NormOrder::L2: {
      const MatrixVar t = scalar(v.name + "_l2_t");
      // -[[t I, v], [v^T, t]] < 0  <=>  ||v||_2 <= t (for t > 0).
      LmiBlock& blk = add_block(n + 1, v.name + "_l2_epi");
      for (int i = 0; i <= n; ++i) {
        blk.add_congruence(t, blk.selector(i, 1), -1.0);
      }
      if (v.kind != VarKind::Diagonal) {
        throw std::invalid_argument("norm objective: vector variable required");
      }
      Matrix right = Matrix::Zero(n, n + 1);
      right.col(n).setOnes();
      blk.add_sym(v, blk.selector(0, n), right, -1.0);
      Vector c = Vector::Zero(next_offset_);
      c[t.offset] = 1.0;
      objective_ = c;
      break;
    }
    case NormOrder::Linf: {
      const MatrixVar t = scalar(v.name + "_linf_t");
      for (int k = 0; k < n; ++k) {
        Vector row = Vector::Zero(next_offset_);
        row[v.offset + k] = 1.0;
        row[t.offset] = -1.0;
        add_linear_le(row, 0.0, v.name + "_linf_epi" + std::to_string(k));
      }
      Vector c = Vector::Zero(next_offset_);
      c[t.offset] = 1.0;
      objective_ = c;
      break;
    }
  }
}

Matrix LmiProblem::unit_component(const MatrixVar& v, int local_index) {
  Matrix U = Matrix::Zero(v.rows, v.cols);
  switch (v.kind) {
    case VarKind::Symmetric: {
      int l = local_index;
      int j = 0;
      while (l > j) {
        l -= j + 1;
        ++j;
      }
      const int i = l;
      U(i, j) = 1.0;
      U(j, i) = 1.0;
      break;
    }
    case VarKind::Rectangular:
      U(local_index / v.cols, local_index % v.cols) = 1.0;
      break;
    case VarKind::Diagonal:
      U(local_index, local_index) = 1.0;
      break;
    case VarKind::Scalar:
      U(0, 0) = 1.0;
      break;
  }
  return U;
}

SdpProblem LmiProblem::vectorize(double eps) const {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("vectorize: eps must be positive");
  }
  SdpProblem problem;
  problem.n_vars = next_offset_;
  problem.strictness_epsilon = eps;
  problem.objective = Vector::Zero(next_offset_);
  if (objective_.size() > 0) {
    problem.objective.head(objective_.size()) = objective_;
  }
  problem.nonneg_indices = nonneg_;
  for (const auto& lc : linear_) {
    Vector row = Vector::Zero(next_offset_);
    row.head(lc.row.size()) = lc.row;
    problem.linear_constraints.push_back({row, lc.bound});
  }

  std::vector<bool> used(vars_.size(), false);
  for (const LmiBlock& blk : blocks_) {
    VectorizedBlock vb;
    vb.G0 = exact_symmetrize(blk.constant_part());
    for (const MatrixVar& v : vars_) {
      for (int local = 0; local < v.dim; ++local) {
        const Matrix U = unit_component(v, local);
        Matrix slope = Matrix::Zero(blk.size(), blk.size());
        bool touched = false;
        for (const LmiTerm& term : blk.terms()) {
          if (term.var_id < 0 ||
              term.var_id >= static_cast<int>(vars_.size())) {
            throw std::invalid_argument("vectorize: undeclared variable");
          }
          if (term.var_id != v.id) continue;
          touched = true;
          if (term.mode == LmiTerm::Mode::SymPair) {
            const Matrix base = term.transpose_var ? U.transpose() : U;
            const Matrix T = term.coeff * (term.left * base * term.right);
            slope += T + T.transpose();
          } else {
            slope +=
                term.coeff * (term.left * U * term.left.transpose());
          }
        }
        if (!touched) continue;
        used[v.id] = true;
        slope = exact_symmetrize(slope);
        if (slope.cwiseAbs().maxCoeff() > 0.0) {
          vb.slopes.emplace_back(v.offset + local, std::move(slope));
        }
      }
    }
    problem.psd_blocks.push_back(std::move(vb));
  }

  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (used[i]) continue;
    const MatrixVar& v = vars_[i];
    bool touched = false;
    for (int idx : nonneg_) {
      if (idx >= v.offset && idx < v.offset + v.dim) touched = true;
    }
    for (const auto& lc : problem.linear_constraints) {
      for (int k = 0; k < v.dim; ++k) {
        if (lc.row[v.offset + k] != 0.0) touched = true;
      }
    }
    if (!touched) {
      throw std::invalid_argument("vectorize: variable never used: " + v.name);
    }
  }
  return problem;
}

Matrix LmiProblem::extract(const Vector& x, const MatrixVar& v) const {
  const bool known =
      v.id >= 0 && v.id < static_cast<int>(vars_.size()) &&
      vars_[v.id].offset == v.offset && vars_[v.id].kind == v.kind &&
      vars_[v.id].rows == v.rows && vars_[v.id].cols == v.cols;
  if (!known) {
    throw std::invalid_argument("extract: variable not in this problem");
  }
  if (x.size() < v.offset + v.dim) {
    throw std::invalid_argument("extract: decision vector too short");
  }
  Matrix M = Matrix::Zero(v.rows, v.cols);
  for (int local = 0; local < v.dim; ++local) {
    const double value = x[v.offset + local];
    switch (v.kind) {
      case VarKind::Symmetric: {
        int l = local;
        int j = 0;
        while (l > j) {
          l -= j + 1;
          ++j;
        }
        M(l, j) = value;
        M(j, l) = value;
        break;
      }
      case VarKind::Rectangular:
        M(local / v.cols, local % v.cols) = value;
        break;
      case VarKind::Diagonal:
        M(local, local) = value;
        break;
      case VarKind::Scalar:
        M(0, 0) = value;
        break;
    }
  }
  return M;
}

Vector LmiProblem::pack(const Matrix& M, const MatrixVar& v) const {
  if (M.rows() != v.rows || M.cols() != v.cols) {
    throw std::invalid_argument("pack: shape mismatch");
  }
  Vector x = Vector::Zero(v.dim);
  for (int local = 0; local < v.dim; ++local) {
    switch (v.kind) {
      case VarKind::Symmetric: {
        int l = local;
        int j = 0;
        while (l > j) {
          l -= j + 1;
          ++j;
        }
        x[local] = M(l, j);
        break;
      }
      case VarKind::Rectangular:
        x[local] = M(local / v.cols, local % v.cols);
        break;
      case VarKind::Diagonal:
        x[local] = M(local, local);
        break;
      case VarKind::Scalar:
        x[local] = M(0, 0);
        break;
    }
  }
  return x;
}

}  // namespace lpvp
