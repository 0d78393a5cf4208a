#include "lpvp/affine.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace lpvp {

AffineMatrixFunction::AffineMatrixFunction(Matrix constant)
    : constant_(std::move(constant)) {}

AffineMatrixFunction AffineMatrixFunction::zero(Eigen::Index rows,
                                                Eigen::Index cols) {
  return AffineMatrixFunction(Matrix::Zero(rows, cols));
}

void AffineMatrixFunction::add_basis(int param_index, Matrix coeff) {
  if (param_index < 0) {
    throw std::invalid_argument("affine basis: negative parameter index");
  }
  if (coeff.rows() != constant_.rows() || coeff.cols() != constant_.cols()) {
    throw std::invalid_argument("affine basis: shape mismatch with constant");
  }
  auto pos = std::lower_bound(
      basis_.begin(), basis_.end(), param_index,
      [](const auto& entry, int idx) { return entry.first < idx; });
  if (pos != basis_.end() && pos->first == param_index) {
    throw std::invalid_argument("affine basis: duplicate parameter index");
  }
  basis_.insert(pos, {param_index, std::move(coeff)});
}

int AffineMatrixFunction::max_param_index() const {
  return basis_.empty() ? -1 : basis_.back().first;
}

Matrix AffineMatrixFunction::eval(const Vector& rho) const {
  if (rho.size() <= max_param_index()) {
    throw std::invalid_argument("affine eval: rho shorter than basis indices");
  }
  Matrix out = constant_;
  for (const auto& [idx, coeff] : basis_) {
    out.noalias() += rho[idx] * coeff;
  }
  return out;
}

AffineMatrixFunction AffineMatrixFunction::left_multiplied(
    const Matrix& left) const {
  AffineMatrixFunction out(left * constant_);
  for (const auto& [idx, coeff] : basis_) {
    out.add_basis(idx, left * coeff);
  }
  return out;
}

AffineMatrixFunction AffineMatrixFunction::right_multiplied(
    const Matrix& right) const {
  AffineMatrixFunction out(constant_ * right);
  for (const auto& [idx, coeff] : basis_) {
    out.add_basis(idx, coeff * right);
  }
  return out;
}

AffineMatrixFunction AffineMatrixFunction::operator+(
    const AffineMatrixFunction& other) const {
  if (rows() != other.rows() || cols() != other.cols()) {
    throw std::invalid_argument("affine sum: shape mismatch");
  }
  AffineMatrixFunction out(constant_ + other.constant_);
  out.basis_ = basis_;
  for (const auto& [idx, coeff] : other.basis_) {
    auto pos = std::lower_bound(
        out.basis_.begin(), out.basis_.end(), idx,
        [](const auto& entry, int i) { return entry.first < i; });
    if (pos != out.basis_.end() && pos->first == idx) {
      pos->second += coeff;
    } else {
      out.basis_.insert(pos, {idx, coeff});
    }
  }
  return out;
}

AffineMatrixFunction AffineMatrixFunction::hstack(
    const AffineMatrixFunction& a, const AffineMatrixFunction& b) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("affine hstack: row mismatch");
  }
  const Eigen::Index rows = a.rows();
  const Eigen::Index ca = a.cols();
  const Eigen::Index cb = b.cols();
  Matrix constant(rows, ca + cb);
  constant << a.constant_, b.constant_;
  AffineMatrixFunction out(std::move(constant));
  auto embed = [&](const std::pair<int, Matrix>& entry, Eigen::Index col0,
                   Eigen::Index width) {
    Matrix coeff = Matrix::Zero(rows, ca + cb);
    coeff.block(0, col0, rows, width) = entry.second;
    return std::pair<int, Matrix>{entry.first, std::move(coeff)};
  };
  std::vector<std::pair<int, Matrix>> merged;
  for (const auto& entry : a.basis_) merged.push_back(embed(entry, 0, ca));
  for (const auto& entry : b.basis_) merged.push_back(embed(entry, ca, cb));
  for (auto& [idx, coeff] : merged) {
    auto pos = std::lower_bound(
        out.basis_.begin(), out.basis_.end(), idx,
        [](const auto& e, int i) { return e.first < i; });
    if (pos != out.basis_.end() && pos->first == idx) {
      pos->second += coeff;
    } else {
      out.basis_.insert(pos, {idx, std::move(coeff)});
    }
  }
  return out;
}

ParameterBox::ParameterBox(Vector lo, Vector hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("parameter box: bound size mismatch");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) {
      throw std::invalid_argument("parameter box: lower > upper");
    }
  }
}

std::size_t ParameterBox::vertex_count() const {
  std::size_t count = 1;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!degenerate(i)) count *= 2;
  }
  return count;
}

std::vector<Vector> ParameterBox::vertices() const {
  std::vector<Eigen::Index> free_coords;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!degenerate(i)) free_coords.push_back(i);
  }
  const std::size_t count = std::size_t{1} << free_coords.size();
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    Vector v = lower;
    for (std::size_t bit = 0; bit < free_coords.size(); ++bit) {
      if (code & (std::size_t{1} << bit)) {
        v[free_coords[bit]] = upper[free_coords[bit]];
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

bool ParameterBox::contains(const Vector& rho, double tol) const {
  if (rho.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (rho[i] < lower[i] - tol || rho[i] > upper[i] + tol) return false;
  }
  return true;
}

std::vector<Vector> sample_box(const ParameterBox& box, int count,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vector v(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i) {
      v[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace lpvp
