#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "matfn/matrix.hpp"

namespace matfn {

/// Numerical thresholds. Unset fields get matrix-dependent defaults:
///   cluster  = n * ||A||_1 * sqrt(eps)
///   rank     = n * eps * (largest column norm of the matrix being ranked)
///   residual = 1e-10
struct Tolerances {
  std::optional<double> cluster;
  std::optional<double> rank;
  double residual = 1e-10;

  /// Throws std::invalid_argument if any set value is negative or NaN.
  void validate() const;

  double cluster_for(const RealMatrix& a) const;
  /// Singular-value threshold for a matrix of order n whose scale is `scale`.
  double rank_for(std::size_t n, double scale) const;
};

struct Eigenvalue {
  Complex value;
  std::size_t multiplicity = 1;
};

/// A = Q T Q^T with Q orthogonal and T quasi-upper-triangular.
struct RealSchur {
  RealMatrix q;
  RealMatrix t;
  /// Eigenvalues read off the 1x1 / 2x2 diagonal blocks, in diagonal order.
  /// Complex ones come in exact conjugate pairs.
  std::vector<Complex> eigenvalues;
};

/// Hessenberg reduction followed by Francis double-shift QR.
/// Throws NonConvergence after 30n iterations.
RealSchur real_schur(const RealMatrix& a);

/// Spectrum with multiplicities: eigenvalues within the cluster tolerance are
/// merged, |Im| <= cluster tolerance is reported as exactly real, and
/// complex clusters are returned in conjugate pairs. Sorted by (Re, Im).
std::vector<Eigenvalue> eigenvalues(const RealMatrix& a, const Tolerances& tol = {});

/// Partial-pivoting inverse; throws Singular when a pivot is at or below the
/// rank tolerance.
RealMatrix inverse(const RealMatrix& a, const Tolerances& tol = {});
ComplexMatrix inverse(const ComplexMatrix& a, const Tolerances& tol = {});

double determinant(const RealMatrix& a);

/// The 1-norm (maximum absolute column sum); submultiplicative.
double operator_norm(const RealMatrix& a);
double operator_norm(const ComplexMatrix& a);

/// Real polynomial, coefficients in ascending powers: c[0] + c[1] X + ...
struct Polynomial {
  std::vector<double> coefficients;
};

/// Horner evaluation of p(A). The empty polynomial evaluates to 0.
RealMatrix poly_eval(const Polynomial& p, const RealMatrix& a);

/// ||A - B||_1 / ||A||_1, or the absolute difference when A == 0.
double relative_difference(const RealMatrix& a, const RealMatrix& b);
double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace matfn
