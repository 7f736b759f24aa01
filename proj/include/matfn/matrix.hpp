#pragma once

// Dense square matrices over double and std::complex<double>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace matfn {

using Complex = std::complex<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Conjugate that keeps real scalars real (std::conj(double) promotes).
inline double conj_scalar(double x) { return x; }
inline Complex conj_scalar(const Complex& z) { return std::conj(z); }

/// Thrown when a matrix is built from data that is not square or not finite.
class InvalidMatrix : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Square n x n matrix stored row-major.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, T{}) {}

  Matrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()), data_() {
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw InvalidMatrix("matrix rows must have length n");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    check_finite();
  }

  /// Builds from row vectors; validates squareness and finiteness.
  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size())
        throw InvalidMatrix("row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " +
                            std::to_string(rows.size()));
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.n_);
    }
    m.check_finite();
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<const T> data() const noexcept { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) {
      if constexpr (is_complex<T>::value)
        return std::isfinite(x.real()) && std::isfinite(x.imag());
      else
        return std::isfinite(x);
    });
  }

  Matrix& operator+=(const Matrix& o) {
    require_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.require_same(b);
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  Matrix transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Conjugate transpose; equals transpose() for real matrices.
  Matrix adjoint() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = conj_scalar((*this)(i, j));
    return t;
  }

  T trace() const {
    T s{};
    for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, static_cast<double>(std::abs(x)));
    return m;
  }

 private:
  void check_finite() const {
    if (!all_finite()) throw InvalidMatrix("matrix entries must be finite");
  }
  void require_same(const Matrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("matrix dimension mismatch");
  }

  std::size_t n_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

inline ComplexMatrix to_complex(const RealMatrix& a) {
  ComplexMatrix c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) c(i, j) = a(i, j);
  return c;
}

inline RealMatrix real_part(const ComplexMatrix& a) {
  RealMatrix r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) r(i, j) = a(i, j).real();
  return r;
}

/// Integer power by repeated squaring; p >= 0.
template <typename T>
Matrix<T> power(const Matrix<T>& a, unsigned p) {
  Matrix<T> result = Matrix<T>::identity(a.size());
  Matrix<T> base = a;
  while (p > 0) {
    if (p & 1u) result = result * base;
    p >>= 1u;
    if (p > 0) base = base * base;
  }
  return result;
}

/// Copies `block` into `dst` with its top-left corner at (offset, offset).
template <typename T>
void set_block(Matrix<T>& dst, std::size_t offset, const Matrix<T>& block) {
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = 0; j < block.size(); ++j) dst(offset + i, offset + j) = block(i, j);
}

template <typename T>
Matrix<T> get_block(const Matrix<T>& src, std::size_t offset, std::size_t n) {
  Matrix<T> b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = src(offset + i, offset + j);
  return b;
}

}  // namespace matfn
