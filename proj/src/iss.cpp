#include "matfn/iss.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "matfn/errors.hpp"
#include "matfn/matfuncs.hpp"

namespace matfn {

IssReport iss_log(const RealMatrix& a, unsigned k_max, const Tolerances& tol) {
  tol.validate();
  const std::size_t n = a.size();
  const RealMatrix id = RealMatrix::identity(n);

  // Fail on the same preconditions as the principal logarithm even when A is
  // already close to I.
  const double ctol = tol.cluster_for(a);
  for (const auto& e : eigenvalues(a, tol)) {
    if (std::abs(e.value) <= ctol) throw Singular("iss_log needs an invertible matrix");
    if (e.value.imag() == 0.0 && e.value.real() < 0)
      throw NegativeEigenvalue("iss_log is undefined for a matrix with a negative real eigenvalue");
  }

  IssReport report;
  RealMatrix root = a;
  report.closeness.push_back(operator_norm(root - id));
  while (report.closeness.back() > kIssCloseness) {
    if (report.k >= k_max)
      throw BudgetExceeded("A^(1/2^k) still " + std::to_string(report.closeness.back()) +
                           " from I after " + std::to_string(k_max) + " square roots");
    root = principal_sqrt(root, tol).value;
    ++report.k;
    report.closeness.push_back(operator_norm(root - id));
  }
  report.final_closeness = report.closeness.back();

  // log(I + N) = sum (-1)^(j+1) N^j / j, stopped once the tail bound
  // ||N||^(m+1) / ((m+1)(1 - ||N||)) drops below eps.
  const RealMatrix nil = root - id;
  const double x = report.final_closeness;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  RealMatrix sum(n);
  RealMatrix term = id;
  std::size_t m = 0;
  while (x > 0 && std::pow(x, m + 1) / ((m + 1) * (1 - x)) >= kEps) {
    ++m;
    term = term * nil;
    sum += term * ((m % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(m));
  }
  report.series_terms = m;
  report.value = sum * std::ldexp(1.0, static_cast<int>(report.k));
  return report;
}

double residual(const RealMatrix& a, const RealMatrix& x, ResidualKind kind, unsigned p) {
  switch (kind) {
    case ResidualKind::Log:
      return relative_difference(a, expm(x));
    case ResidualKind::Sqrt:
      return relative_difference(a, x * x);
    case ResidualKind::Root:
      return relative_difference(a, power(x, p));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace matfn
