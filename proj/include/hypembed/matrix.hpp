#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypembed/errors.hpp"
#include "hypembed/real.hpp"

namespace hypembed {

// Dense row-major matrix.
template <Real R>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, R(0.0)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  R& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const R& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<R> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const R> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<R>& data() noexcept { return data_; }
  const std::vector<R>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<R> data_;
};

// Square symmetric matrix; symmetry and finiteness are checked on
// construction from a general matrix.
template <Real R>
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n, n) {}
  explicit SymMatrix(Matrix<R> m) : m_(std::move(m)) {
    using std::isfinite;
    if (m_.rows() != m_.cols()) throw InputError("symmetric matrix must be square");
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = 0; j < size(); ++j) {
        if (!isfinite(m_(i, j))) throw InputError("matrix entry is not finite");
        if (j > i && !(m_(i, j) == m_(j, i))) throw InputError("matrix is not symmetric");
      }
    }
  }

  std::size_t size() const noexcept { return m_.rows(); }
  const R& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  // Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, const R& v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix<R>& matrix() const noexcept { return m_; }

 private:
  Matrix<R> m_;
};

template <Real To, Real From>
Matrix<To> convert_matrix(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.data().size(); ++i) out.data()[i] = convert_real<To>(m.data()[i]);
  return out;
}

template <Real R>
R frobenius_norm(const Matrix<R>& m) {
  using std::sqrt;
  R s(0.0);
  for (const R& v : m.data()) s += v * v;
  return sqrt(s);
}

template <Real R>
R dot(std::span<const R> a, std::span<const R> b) {
  R s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <Real R>
R norm2(std::span<const R> a) {
  return dot<R>(a, a);
}

}  // namespace hypembed
