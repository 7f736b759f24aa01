#pragma once

// Low-level dense kernels shared by the higher modules: column sets,
// one-sided Jacobi SVD, LU with partial pivoting. Templated over double and
// Complex so the Jordan chain code can run in either field.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "matfn/errors.hpp"
#include "matfn/matrix.hpp"

namespace matfn::dense {

template <typename T>
using Vec = std::vector<T>;

/// A list of column vectors of equal length (an n x k matrix, k may be 0).
template <typename T>
using Columns = std::vector<Vec<T>>;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename T>
T dot(const Vec<T>& a, const Vec<T>& b) {  // a^H b
  T s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += conj_scalar(a[i]) * b[i];
  return s;
}

template <typename T>
double norm2(const Vec<T>& a) {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return std::sqrt(s);
}

template <typename T>
Vec<T> apply(const Matrix<T>& m, const Vec<T>& x) {
  Vec<T> y(m.size(), T{});
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

template <typename T>
Columns<T> columns_of(const Matrix<T>& m) {
  Columns<T> cols(m.size(), Vec<T>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) cols[j][i] = m(i, j);
  return cols;
}

/// Square matrix whose columns are `cols` (requires cols.size() == n).
template <typename T>
Matrix<T> from_columns(const Columns<T>& cols) {
  Matrix<T> m(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols.size(); ++i) m(i, j) = cols[j][i];
  return m;
}

/// Thin SVD of an n x k column set: A = U diag(sigma) V^H, sigma descending.
template <typename T>
struct Svd {
  Columns<T> u;       // k left singular vectors (zero columns where sigma == 0)
  Vec<double> sigma;  // k singular values
  Columns<T> v;       // k right singular vectors, each of length k
};

/// One-sided (Hestenes) Jacobi SVD. High relative accuracy, O(n^3) per sweep.
template <typename T>
Svd<T> jacobi_svd(Columns<T> a) {
  const std::size_t k = a.size();
  Columns<T> v(k, Vec<T>(k, T{}));
  for (std::size_t i = 0; i < k; ++i) v[i][i] = T{1};

  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double alpha = std::pow(norm2(a[p]), 2);
        const double beta = std::pow(norm2(a[q]), 2);
        const T gamma = dot(a[p], a[q]);
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;

        // Rotate the phase of column q so the off-diagonal Gram entry is real.
        T phase{1};
        if constexpr (is_complex<T>::value) phase = std::conj(gamma) / g;
        else phase = gamma > 0 ? 1.0 : -1.0;

        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        auto rotate = [&](Vec<T>& xp, Vec<T>& xq) {
          for (std::size_t i = 0; i < xp.size(); ++i) {
            const T yp = xp[i];
            const T yq = xq[i] * phase;
            xp[i] = c * yp - s * yq;
            xq[i] = s * yp + c * yq;
          }
        };
        rotate(a[p], a[q]);
        rotate(v[p], v[q]);
      }
    }
    if (!rotated) break;
  }

  Vec<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) sigma[j] = norm2(a[j]);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd<T> out;
  for (std::size_t j : order) {
    Vec<T> uj = a[j];
    if (sigma[j] > 0)
      for (auto& x : uj) x /= sigma[j];
    out.u.push_back(std::move(uj));
    out.sigma.push_back(sigma[j]);
    // v is stored by columns already: v[j] is the j-th column of V.
    out.v.push_back(v[j]);
  }
  return out;
}

/// Orthonormal basis for the span of `cols`; vectors with singular value
/// below `rel_tol * sigma_max` are dropped.
template <typename T>
Columns<T> orthonormal_basis(const Columns<T>& cols, double rel_tol) {
  if (cols.empty()) return {};
  const Svd<T> s = jacobi_svd(cols);
  Columns<T> basis;
  const double top = s.sigma.front();
  for (std::size_t j = 0; j < s.sigma.size(); ++j)
    if (s.sigma[j] > rel_tol * top && s.sigma[j] > 0) basis.push_back(s.u[j]);
  return basis;
}

/// Basis of the `dim` right singular vectors of `m` with the smallest
/// singular values (the numerical null space of prescribed dimension).
template <typename T>
Columns<T> null_space(const Matrix<T>& m, std::size_t dim) {
  const Svd<T> s = jacobi_svd(columns_of(m));
  Columns<T> basis;
  const std::size_t n = m.size();
  for (std::size_t j = n - dim; j < n; ++j) basis.push_back(s.v[j]);
  return basis;
}

inline Vec<double> singular_values(const RealMatrix& m) { return jacobi_svd(columns_of(m)).sigma; }
inline Vec<double> singular_values(const ComplexMatrix& m) {
  return jacobi_svd(columns_of(m)).sigma;
}

/// PA = LU with partial pivoting, packed in one matrix.
template <typename T>
struct Lu {
  Matrix<T> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

/// Throws Singular when a pivot magnitude is at or below `pivot_tol`.
template <typename T>
Lu<T> lu_decompose(const Matrix<T>& a, double pivot_tol) {
  const std::size_t n = a.size();
  Lu<T> f{a, std::vector<std::size_t>(n), 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  Matrix<T>& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    if (!(best > pivot_tol))
      throw Singular("matrix is singular to working tolerance (pivot " + std::to_string(best) +
                     " at column " + std::to_string(k + 1) + ")");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const T l = m(i, k) / m(k, k);
      m(i, k) = l;
      if (l == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return f;
}

template <typename T>
Matrix<T> lu_inverse(const Lu<T>& f) {
  const std::size_t n = f.lu.size();
  Matrix<T> inv(n);
  for (std::size_t col = 0; col < n; ++col) {
    Vec<T> x(n, T{});
    for (std::size_t i = 0; i < n; ++i) x[i] = (f.perm[i] == col) ? T{1} : T{};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
      x[i] /= f.lu(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

/// Largest Euclidean column norm; the default scale for rank thresholds.
template <typename T>
double max_column_norm(const Matrix<T>& m) {
  double best = 0.0;
  for (const auto& c : columns_of(m)) best = std::max(best, norm2(c));
  return best;
}

}  // namespace matfn::dense
