#pragma once

// Inverse scaling and squaring: log(A) = 2^k log(A^(1/2^k)), with the inner
// logarithm taken from a truncated Mercator series once A^(1/2^k) is close to I.

#include <cstddef>
#include <vector>

#include "matfn/linalg.hpp"
#include "matfn/matrix.hpp"

namespace matfn {

inline constexpr double kIssCloseness = 0.25;
inline constexpr unsigned kIssMaxRoots = 40;

struct IssReport {
  unsigned k = 0;                  // square roots taken
  std::size_t series_terms = 0;    // Mercator terms summed
  double final_closeness = 0.0;    // ||A^(1/2^k) - I||_1 before the series
  std::vector<double> closeness;   // ||A^(1/2^j) - I||_1 for j = 0..k
  RealMatrix value;
};

/// Throws NegativeEigenvalue / Singular on bad input and BudgetExceeded when
/// k_max square roots do not bring A within kIssCloseness of I.
IssReport iss_log(const RealMatrix& a, unsigned k_max = kIssMaxRoots, const Tolerances& tol = {});

enum class ResidualKind { Log, Sqrt, Root };

/// ||f^-1(X) - A||_1 / ||A||_1: expm(X) for Log, X^2 for Sqrt, X^p for Root.
double residual(const RealMatrix& a, const RealMatrix& x, ResidualKind kind, unsigned p = 2);

}  // namespace matfn
