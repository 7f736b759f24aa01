#pragma once

// Matrix exponential, real logarithms, square roots and p-th roots built on
// the real Jordan form, with existence verdicts and principal-branch checks.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "matfn/errors.hpp"
#include "matfn/linalg.hpp"
#include "matfn/matrix.hpp"

namespace matfn {

struct ExpmOptions {
  /// Force this many squarings instead of the smallest s with ||A||/2^s <= 1/2.
  std::optional<unsigned> squarings;
};

/// Scaling and squaring with a truncated Taylor series.
RealMatrix expm(const RealMatrix& a, const ExpmOptions& opts = {});

/// log(I + N) = N - N^2/2 + N^3/3 - ... with exactly r - 1 terms, N = U - I.
/// Throws NotUnipotent if (U - I)^r has an entry above the rank tolerance.
RealMatrix log_unipotent(const RealMatrix& u, std::size_t r, const Tolerances& tol = {});

/// (I + N)^(1/p) as the binomial series sum_k C(1/p, k) N^k, k < r.
RealMatrix root_unipotent(const RealMatrix& u, unsigned p, std::size_t r,
                          const Tolerances& tol = {});

struct ExistenceVerdict {
  bool exists = false;
  bool invertible = false;
  std::vector<BlockCount> offending;
  /// Set for square roots of singular matrices, which this criterion does not decide.
  bool singular_caveat = false;
};

/// Real logarithm exists iff A is invertible and every negative real
/// eigenvalue has an even number of identical Jordan blocks of each size.
ExistenceVerdict has_real_log(const RealMatrix& a, const Tolerances& tol = {});
/// Same criterion for invertible A; singular A is reported as not existing
/// with singular_caveat set.
ExistenceVerdict has_real_sqrt(const RealMatrix& a, const Tolerances& tol = {});

class NoRealLog : public PreconditionError {
 public:
  explicit NoRealLog(ExistenceVerdict v);
  const ExistenceVerdict& verdict() const noexcept { return verdict_; }

 private:
  ExistenceVerdict verdict_;
};

class NoRealSqrt : public PreconditionError {
 public:
  explicit NoRealSqrt(ExistenceVerdict v);
  const ExistenceVerdict& verdict() const noexcept { return verdict_; }

 private:
  ExistenceVerdict verdict_;
};

enum class Branch { Principal, Constructed };

struct FnResult {
  RealMatrix value;
  /// ||check - A||_1 / ||A||_1 with check = expm(value), value^2 or value^p.
  double residual = 0.0;
  Branch branch = Branch::Constructed;
  /// Eigenvalues of value lie strictly inside the strip / half-plane / sector.
  bool domain_ok = false;
  /// Some eigenvalue of A sits close to (but not on) the negative real axis.
  bool near_negative_axis = false;
};

/// A real logarithm via the paired real Jordan form (one representative when
/// A has negative eigenvalues; branch = Constructed).
FnResult real_log(const RealMatrix& a, const Tolerances& tol = {});
/// The unique real logarithm with eigenvalue imaginary parts in (-pi, pi).
FnResult principal_log(const RealMatrix& a, const Tolerances& tol = {});

FnResult real_sqrt(const RealMatrix& a, const Tolerances& tol = {});
/// The unique real square root with eigenvalues in the open right half-plane.
FnResult principal_sqrt(const RealMatrix& a, const Tolerances& tol = {});

/// The unique real p-th root with eigenvalue arguments in (-pi/p, pi/p).
FnResult principal_root(const RealMatrix& a, unsigned p, const Tolerances& tol = {});

const char* to_string(Branch b);

}  // namespace matfn
