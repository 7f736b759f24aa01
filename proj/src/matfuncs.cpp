#include "matfn/matfuncs.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "matfn/dense.hpp"
#include "matfn/jordan.hpp"

namespace matfn {

using dense::kEps;

RealMatrix expm(const RealMatrix& a, const ExpmOptions& opts) {
  const std::size_t n = a.size();
  const double norm = operator_norm(a);
  unsigned s = 0;
  if (opts.squarings) {
    s = *opts.squarings;
  } else {
    while (std::ldexp(norm, -static_cast<int>(s)) > 0.5) ++s;
  }
  const RealMatrix b = a * std::ldexp(1.0, -static_cast<int>(s));
  const double bnorm = operator_norm(b);

  RealMatrix sum = RealMatrix::identity(n);
  RealMatrix term = RealMatrix::identity(n);
  double bound = 1.0;  // ||B||^k / k!
  constexpr int kMaxTerms = 2000;
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = term * b * (1.0 / k);
    sum += term;
    bound *= bnorm / (k + 1);
    if (term.max_abs() == 0.0 || bound < kEps * operator_norm(sum)) break;
  }
  for (unsigned i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

namespace {

RealMatrix nilpotent_part(const RealMatrix& u, std::size_t r, const Tolerances& tol) {
  tol.validate();
  const std::size_t n = u.size();
  RealMatrix nil = u - RealMatrix::identity(n);
  const double threshold = tol.rank_for(n, std::max(1.0, dense::max_column_norm(u)));
  const double top = power(nil, static_cast<unsigned>(r)).max_abs();
  if (!(top <= threshold))
    throw NotUnipotent("(U - I)^" + std::to_string(r) + " has an entry of magnitude " +
                       std::to_string(top) + ", above " + std::to_string(threshold));
  return nil;
}

RealMatrix log_series(const RealMatrix& nil, std::size_t r) {
  RealMatrix sum(nil.size());
  RealMatrix term = RealMatrix::identity(nil.size());
  for (std::size_t k = 1; k < r; ++k) {
    term = term * nil;
    const double coef = (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
    sum += term * coef;
  }
  return sum;
}

RealMatrix binomial_series(const RealMatrix& nil, unsigned p, std::size_t r) {
  const double a = 1.0 / p;
  RealMatrix sum = RealMatrix::identity(nil.size());
  RealMatrix term = RealMatrix::identity(nil.size());
  double coef = 1.0;  // C(1/p, k)
  for (std::size_t k = 1; k < r; ++k) {
    coef *= (a - static_cast<double>(k - 1)) / static_cast<double>(k);
    term = term * nil;
    sum += term * coef;
  }
  return sum;
}

double nth_root(double x, unsigned p) {
  if (p == 2) return std::sqrt(x);
  if (p == 3) return std::cbrt(x);
  return std::pow(x, 1.0 / p);
}

RealMatrix cell(double lambda, double mu) { return RealMatrix{{lambda, -mu}, {mu, lambda}}; }

enum class Kind { Log, Root };

// f(J) for one block of a paired real Jordan form.
RealMatrix block_value(const JordanBlockSpec& b, Kind kind, unsigned p) {
  const std::size_t r = b.size;
  if (b.kind == BlockKind::Simple) {
    const double alpha = b.eigenvalue.real();
    if (!(alpha > 0))
      throw std::logic_error("Simple block with non-positive eigenvalue reached block_value");
    // J_r(alpha) = alpha (I + N) with N = superdiagonal / alpha.
    RealMatrix nil(r);
    for (std::size_t i = 0; i + 1 < r; ++i) nil(i, i + 1) = 1.0 / alpha;
    if (kind == Kind::Log) {
      RealMatrix y = log_series(nil, r);
      for (std::size_t i = 0; i < r; ++i) y(i, i) += std::log(alpha);
      return y;
    }
    return binomial_series(nil, p, r) * nth_root(alpha, p);
  }

  // J_2r(lambda, mu) = D (I + N), D = diag(L, ..., L), N = D^-1 H.
  const double lam = b.eigenvalue.real(), mu = b.eigenvalue.imag();
  const double rho = std::hypot(lam, mu);
  double theta = std::atan2(mu, lam);
  if (theta >= std::numbers::pi) theta = -std::numbers::pi;  // theta in [-pi, pi)
  const std::size_t dim = 2 * r;
  const RealMatrix l_inv = cell(lam / (rho * rho), -mu / (rho * rho));
  RealMatrix nil(dim);
  for (std::size_t k = 0; k + 1 < r; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) nil(2 * k + i, 2 * (k + 1) + j) = l_inv(i, j);

  RealMatrix s(dim);
  if (kind == Kind::Log) {
    const RealMatrix sc = cell(std::log(rho), theta);
    for (std::size_t k = 0; k < r; ++k) set_block(s, 2 * k, sc);
    return s + log_series(nil, r);
  }
  const double phi = theta / p;
  const RealMatrix sc = cell(std::cos(phi), std::sin(phi)) * nth_root(rho, p);
  for (std::size_t k = 0; k < r; ++k) set_block(s, 2 * k, sc);
  return s * binomial_series(nil, p, r);
}

RealMatrix assemble(const RealJordanForm& form, Kind kind, unsigned p) {
  RealMatrix y(form.structure.n);
  std::size_t off = 0;
  for (const auto& b : form.structure.blocks) {
    set_block(y, off, block_value(b, kind, p));
    off += b.dimension();
  }
  return form.p * y * inverse(form.p);
}

bool has_negative_real(const std::vector<Eigenvalue>& eigs) {
  for (const auto& e : eigs)
    if (e.value.imag() == 0.0 && e.value.real() < 0) return true;
  return false;
}

bool near_negative_axis(const std::vector<Eigenvalue>& eigs) {
  constexpr double kAngle = 1e-6;
  for (const auto& e : eigs)
    if (e.value.real() < 0 && e.value.imag() != 0.0 &&
        std::abs(e.value.imag()) <= kAngle * std::abs(e.value))
      return true;
  return false;
}

// Preconditions shared by the principal functions.
std::vector<Eigenvalue> principal_spectrum(const RealMatrix& a, const Tolerances& tol,
                                           const char* what) {
  tol.validate();
  const auto eigs = eigenvalues(a, tol);
  const double ctol = tol.cluster_for(a);
  for (const auto& e : eigs)
    if (std::abs(e.value) <= ctol)
      throw Singular(std::string(what) + " needs an invertible matrix");
  if (has_negative_real(eigs))
    throw NegativeEigenvalue(std::string(what) + " is undefined for a matrix with a negative " +
                             "real eigenvalue");
  return eigs;
}

bool in_strip(const RealMatrix& x) {
  for (const auto& e : eigenvalues(x))
    if (!(std::abs(e.value.imag()) < std::numbers::pi)) return false;
  return true;
}

bool in_sector(const RealMatrix& x, unsigned p) {
  for (const auto& e : eigenvalues(x))
    if (!(std::abs(std::arg(e.value)) < std::numbers::pi / p) || e.value == Complex{}) return false;
  return true;
}

void check_residual(const char* what, double residual, const Tolerances& tol) {
  if (!(residual <= tol.residual)) throw ResidualExceeded(what, residual, tol.residual);
}

FnResult root_result(const RealMatrix& a, const RealJordanForm& form, unsigned p,
                     const Tolerances& tol, const char* what) {
  FnResult out;
  out.value = assemble(form, Kind::Root, p);
  out.residual = relative_difference(a, power(out.value, p));
  check_residual(what, out.residual, tol);
  out.domain_ok = in_sector(out.value, p);
  return out;
}

ExistenceVerdict parity_verdict(const RealMatrix& a, const Tolerances& tol) {
  tol.validate();
  ExistenceVerdict v;
  const double ctol = tol.cluster_for(a);
  v.invertible = true;
  for (const auto& e : eigenvalues(a, tol))
    if (std::abs(e.value) <= ctol) v.invertible = false;
  if (!v.invertible) return v;
  v.offending = parity_violations(jordan_structure(a, tol));
  v.exists = v.offending.empty();
  return v;
}

std::string verdict_message(const char* fn, const ExistenceVerdict& v) {
  if (!v.invertible) return std::string("no real ") + fn + ": matrix is singular";
  return std::string("no real ") + fn + ": odd number of identical negative-eigenvalue blocks " +
         describe_blocks(v.offending);
}

}  // namespace

RealMatrix log_unipotent(const RealMatrix& u, std::size_t r, const Tolerances& tol) {
  return log_series(nilpotent_part(u, r, tol), r);
}

RealMatrix root_unipotent(const RealMatrix& u, unsigned p, std::size_t r, const Tolerances& tol) {
  if (p < 2) throw std::invalid_argument("root order p must be >= 2");
  return binomial_series(nilpotent_part(u, r, tol), p, r);
}

NoRealLog::NoRealLog(ExistenceVerdict v)
    : PreconditionError(verdict_message("logarithm", v)), verdict_(std::move(v)) {}
NoRealSqrt::NoRealSqrt(ExistenceVerdict v)
    : PreconditionError(verdict_message("square root", v)), verdict_(std::move(v)) {}

ExistenceVerdict has_real_log(const RealMatrix& a, const Tolerances& tol) {
  return parity_verdict(a, tol);
}

ExistenceVerdict has_real_sqrt(const RealMatrix& a, const Tolerances& tol) {
  ExistenceVerdict v = parity_verdict(a, tol);
  v.singular_caveat = !v.invertible;
  return v;
}

FnResult real_log(const RealMatrix& a, const Tolerances& tol) {
  const ExistenceVerdict v = has_real_log(a, tol);
  if (!v.exists) throw NoRealLog(v);
  const RealJordanForm form = pair_negative_blocks(real_jordan_form(a, tol));
  FnResult out;
  out.value = assemble(form, Kind::Log, 0);
  out.residual = relative_difference(a, expm(out.value));
  check_residual("real logarithm", out.residual, tol);
  out.domain_ok = in_strip(out.value);
  out.near_negative_axis = near_negative_axis(eigenvalues(a, tol));
  return out;
}

FnResult principal_log(const RealMatrix& a, const Tolerances& tol) {
  const auto eigs = principal_spectrum(a, tol, "principal logarithm");
  const RealJordanForm form = real_jordan_form(a, tol);
  FnResult out;
  out.value = assemble(form, Kind::Log, 0);
  out.residual = relative_difference(a, expm(out.value));
  check_residual("principal logarithm", out.residual, tol);
  out.branch = Branch::Principal;
  out.domain_ok = in_strip(out.value);
  out.near_negative_axis = near_negative_axis(eigs);
  if (!out.domain_ok) throw NumericalError("principal logarithm has eigenvalues outside the strip");
  return out;
}

FnResult real_sqrt(const RealMatrix& a, const Tolerances& tol) {
  const ExistenceVerdict v = has_real_sqrt(a, tol);
  if (!v.exists) throw NoRealSqrt(v);
  const RealJordanForm form = pair_negative_blocks(real_jordan_form(a, tol));
  FnResult out = root_result(a, form, 2, tol, "real square root");
  out.near_negative_axis = near_negative_axis(eigenvalues(a, tol));
  return out;
}

FnResult principal_sqrt(const RealMatrix& a, const Tolerances& tol) {
  return principal_root(a, 2, tol);
}

FnResult principal_root(const RealMatrix& a, unsigned p, const Tolerances& tol) {
  if (p < 2) throw std::invalid_argument("root order p must be >= 2");
  const char* what = p == 2 ? "principal square root" : "principal p-th root";
  const auto eigs = principal_spectrum(a, tol, what);
  FnResult out = root_result(a, real_jordan_form(a, tol), p, tol, what);
  out.branch = Branch::Principal;
  out.near_negative_axis = near_negative_axis(eigs);
  if (!out.domain_ok)
    throw NumericalError(std::string(what) + " has eigenvalues outside the principal sector");
  return out;
}

const char* to_string(Branch b) { return b == Branch::Principal ? "principal" : "constructed"; }

}  // namespace matfn
