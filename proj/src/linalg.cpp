#include "matfn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "matfn/dense.hpp"
#include "matfn/errors.hpp"

namespace matfn {

using dense::kEps;

void Tolerances::validate() const {
  auto ok = [](double x) { return x >= 0.0; };  // rejects NaN too
  if (cluster && !ok(*cluster)) throw std::invalid_argument("cluster tolerance must be >= 0");
  if (rank && !ok(*rank)) throw std::invalid_argument("rank tolerance must be >= 0");
  if (!ok(residual)) throw std::invalid_argument("residual tolerance must be >= 0");
}

double Tolerances::cluster_for(const RealMatrix& a) const {
  if (cluster) return *cluster;
  return static_cast<double>(a.size()) * operator_norm(a) * std::sqrt(kEps);
}

double Tolerances::rank_for(std::size_t n, double scale) const {
  if (rank) return *rank;
  return static_cast<double>(n) * kEps * scale;
}

namespace {

// Householder reflector I - beta v v^T applied to rows [r0, r0+len) of h,
// columns [c0, c1].
void reflect_rows(RealMatrix& h, std::size_t r0, const double* v, std::size_t len, double beta,
                  std::size_t c0, std::size_t c1) {
  for (std::size_t j = c0; j <= c1; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[i] * h(r0 + i, j);
    s *= beta;
    for (std::size_t i = 0; i < len; ++i) h(r0 + i, j) -= s * v[i];
  }
}

// Same reflector from the right on columns [c0, c0+len), rows [r0, r1].
void reflect_cols(RealMatrix& h, std::size_t c0, const double* v, std::size_t len, double beta,
                  std::size_t r0, std::size_t r1) {
  for (std::size_t i = r0; i <= r1; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += h(i, c0 + j) * v[j];
    s *= beta;
    for (std::size_t j = 0; j < len; ++j) h(i, c0 + j) -= s * v[j];
  }
}

// Builds v, beta with (I - beta v v^T) x = -sign(x0) ||x|| e1. Returns false
// when x is zero (no reflection needed).
bool householder(const double* x, std::size_t len, double* v, double& beta) {
  double nrm = 0.0;
  for (std::size_t i = 0; i < len; ++i) nrm += x[i] * x[i];
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) return false;
  const double alpha = x[0] >= 0 ? -nrm : nrm;
  for (std::size_t i = 0; i < len; ++i) v[i] = x[i];
  v[0] -= alpha;
  double vv = 0.0;
  for (std::size_t i = 0; i < len; ++i) vv += v[i] * v[i];
  if (vv == 0.0) return false;
  beta = 2.0 / vv;
  return true;
}

void hessenberg(RealMatrix& h, RealMatrix& q) {
  const std::size_t n = h.size();
  std::vector<double> x(n), v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    for (std::size_t i = 0; i < len; ++i) x[i] = h(k + 1 + i, k);
    double beta = 0.0;
    if (!householder(x.data(), len, v.data(), beta)) continue;
    reflect_rows(h, k + 1, v.data(), len, beta, k, n - 1);
    reflect_cols(h, k + 1, v.data(), len, beta, 0, n - 1);
    reflect_cols(q, k + 1, v.data(), len, beta, 0, n - 1);
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

void eigenvalues_2x2(double a, double b, double c, double d, std::vector<Complex>& out) {
  const double half = 0.5 * (a - d);
  const double disc = half * half + b * c;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double z = half + (half >= 0 ? root : -root);
    const double l1 = d + z;
    const double l2 = z != 0.0 ? d - b * c / z : d;
    out.emplace_back(l1, 0.0);
    out.emplace_back(l2, 0.0);
  } else {
    const double re = 0.5 * (a + d);
    const double im = std::sqrt(-disc);
    out.emplace_back(re, im);
    out.emplace_back(re, -im);
  }
}

}  // namespace

RealSchur real_schur(const RealMatrix& a) {
  const std::size_t n = a.size();
  RealSchur out{RealMatrix::identity(n), a, {}};
  if (n == 0) return out;
  RealMatrix& h = out.t;
  RealMatrix& q = out.q;
  hessenberg(h, q);

  const double hnorm = std::max(operator_norm(h), std::numeric_limits<double>::min());
  const std::size_t budget = 30 * n;
  std::size_t total = 0;
  int iter = 0;
  std::size_t p = n - 1;
  while (p >= 1) {
    std::size_t l = p;
    while (l > 0) {
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = hnorm;
      const double sub = std::abs(h(l, l - 1));
      if (sub <= kEps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
      // Ahues-Tisseur test: deflates clusters of nearly equal eigenvalues.
      const double sup = std::abs(h(l - 1, l));
      const double ab = std::max(sub, sup), ba = std::min(sub, sup);
      const double diff = std::abs(h(l - 1, l - 1) - h(l, l));
      const double aa = std::max(std::abs(h(l, l)), diff), bb = std::min(std::abs(h(l, l)), diff);
      const double s2 = aa + ab;
      if (ba * (ab / s2) <= std::max(std::numeric_limits<double>::min(), kEps * (bb * (aa / s2)))) {
        h(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == p) {
      --p;
      iter = 0;
      continue;
    }
    if (l + 1 == p) {
      if (p < 2) break;
      p -= 2;
      iter = 0;
      continue;
    }
    if (++total > budget)
      throw NonConvergence("QR iteration did not converge within " + std::to_string(budget) +
                           " sweeps");
    ++iter;

    double s, t;
    if (iter % 10 == 0) {
      // Exceptional shift near h(p, p) to break cycles.
      const double w = std::abs(h(p, p - 1)) + std::abs(h(p - 1, p - 2));
      const double c = h(p, p) + 0.75 * w;
      s = 2.0 * c;
      t = c * c + 0.4375 * w * w;
    } else {
      s = h(p - 1, p - 1) + h(p, p);
      t = h(p - 1, p - 1) * h(p, p) - h(p - 1, p) * h(p, p - 1);
    }
    double xyz[3] = {h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - s * h(l, l) + t,
                     h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - s),
                     h(l + 1, l) * h(l + 2, l + 1)};
    double v[3];
    double beta = 0.0;
    for (std::size_t k = l; k + 2 <= p; ++k) {
      if (householder(xyz, 3, v, beta)) {
        const std::size_t c0 = k > l ? k - 1 : l;
        reflect_rows(h, k, v, 3, beta, c0, n - 1);
        reflect_cols(h, k, v, 3, beta, 0, std::min(k + 3, p));
        reflect_cols(q, k, v, 3, beta, 0, n - 1);
      }
      xyz[0] = h(k + 1, k);
      xyz[1] = h(k + 2, k);
      if (k + 2 < p) xyz[2] = h(k + 3, k);
    }
    if (householder(xyz, 2, v, beta)) {
      reflect_rows(h, p - 1, v, 2, beta, p - 2, n - 1);
      reflect_cols(h, p - 1, v, 2, beta, 0, p);
      reflect_cols(q, p - 1, v, 2, beta, 0, n - 1);
    }
    // Entries below the subdiagonal are zero in exact arithmetic.
    for (std::size_t i = l + 2; i <= p; ++i)
      for (std::size_t j = l; j + 1 < i; ++j) h(i, j) = 0.0;
  }

  for (std::size_t i = 0; i < n;) {
    if (i + 1 < n && h(i + 1, i) != 0.0) {
      eigenvalues_2x2(h(i, i), h(i, i + 1), h(i + 1, i), h(i + 1, i + 1), out.eigenvalues);
      i += 2;
    } else {
      out.eigenvalues.emplace_back(h(i, i), 0.0);
      ++i;
    }
  }
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Single-linkage clusters of `values` at radius `tol`; returns (centroid, count).
std::vector<Eigenvalue> cluster(const std::vector<Complex>& values, double tol) {
  DisjointSets sets(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (std::abs(values[i] - values[j]) <= tol) sets.unite(i, j);
  std::vector<Eigenvalue> out;
  std::vector<std::size_t> root_of_out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t r = sets.find(i);
    auto it = std::find(root_of_out.begin(), root_of_out.end(), r);
    if (it == root_of_out.end()) {
      root_of_out.push_back(r);
      out.push_back({values[i], 1});
    } else {
      auto& e = out[static_cast<std::size_t>(it - root_of_out.begin())];
      e.value += values[i];
      ++e.multiplicity;
    }
  }
  for (auto& e : out) e.value /= static_cast<double>(e.multiplicity);
  return out;
}

}  // namespace

std::vector<Eigenvalue> eigenvalues(const RealMatrix& a, const Tolerances& tol) {
  tol.validate();
  const double ctol = tol.cluster_for(a);
  const RealSchur schur = real_schur(a);

  std::vector<Complex> reals, uppers;
  for (const Complex& z : schur.eigenvalues) {
    if (std::abs(z.imag()) <= ctol) reals.emplace_back(z.real(), 0.0);
    else if (z.imag() > 0) uppers.push_back(z);
  }

  std::vector<Eigenvalue> out = cluster(reals, ctol);
  for (auto& e : out) e.value = Complex(e.value.real(), 0.0);
  for (const Eigenvalue& e : cluster(uppers, ctol)) {
    out.push_back(e);
    out.push_back({std::conj(e.value), e.multiplicity});
  }
  std::sort(out.begin(), out.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return out;
}

RealMatrix inverse(const RealMatrix& a, const Tolerances& tol) {
  tol.validate();
  const double pivot_tol = tol.rank_for(a.size(), dense::max_column_norm(a));
  return dense::lu_inverse(dense::lu_decompose(a, pivot_tol));
}

ComplexMatrix inverse(const ComplexMatrix& a, const Tolerances& tol) {
  tol.validate();
  const double pivot_tol = tol.rank_for(a.size(), dense::max_column_norm(a));
  return dense::lu_inverse(dense::lu_decompose(a, pivot_tol));
}

double determinant(const RealMatrix& a) {
  try {
    const auto f = dense::lu_decompose(a, 0.0);
    double det = f.sign;
    for (std::size_t i = 0; i < a.size(); ++i) det *= f.lu(i, i);
    return det;
  } catch (const Singular&) {
    return 0.0;
  }
}

namespace {
template <typename T>
double one_norm(const Matrix<T>& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

template <typename T>
double rel_diff(const Matrix<T>& a, const Matrix<T>& b) {
  const double diff = one_norm(Matrix<T>(a - b));
  const double scale = one_norm(a);
  return scale > 0 ? diff / scale : diff;
}
}  // namespace

double operator_norm(const RealMatrix& a) { return one_norm(a); }
double operator_norm(const ComplexMatrix& a) { return one_norm(a); }

double relative_difference(const RealMatrix& a, const RealMatrix& b) { return rel_diff(a, b); }
double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  return rel_diff(a, b);
}

RealMatrix poly_eval(const Polynomial& p, const RealMatrix& a) {
  const std::size_t n = a.size();
  RealMatrix result(n);
  const auto& c = p.coefficients;
  for (std::size_t k = c.size(); k-- > 0;) {
    result = result * a;
    for (std::size_t i = 0; i < n; ++i) result(i, i) += c[k];
  }
  return result;
}

}  // namespace matfn
