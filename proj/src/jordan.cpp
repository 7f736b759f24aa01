#include "matfn/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "matfn/dense.hpp"

namespace matfn {

using dense::Columns;
using dense::Vec;

namespace {

bool block_less(const JordanBlockSpec& x, const JordanBlockSpec& y) {
  if (x.eigenvalue.real() != y.eigenvalue.real()) return x.eigenvalue.real() < y.eigenvalue.real();
  if (x.eigenvalue.imag() != y.eigenvalue.imag()) return x.eigenvalue.imag() < y.eigenvalue.imag();
  return x.size > y.size;
}

std::string format_value(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

template <typename T>
Matrix<T> shifted(const RealMatrix& a, T lambda) {
  Matrix<T> b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) b(i, j) = a(i, j);
  for (std::size_t i = 0; i < a.size(); ++i) b(i, i) -= lambda;
  return b;
}

// Block sizes (descending) of the eigenvalue whose shifted matrix is b and
// whose algebraic multiplicity is m, read off the Weyr staircase.
template <typename T>
std::vector<std::size_t> weyr_block_sizes(const Matrix<T>& b, std::size_t m, const Tolerances& tol,
                                          Complex lambda) {
  if (m == 1) return {1};
  const std::size_t n = b.size();
  std::vector<std::size_t> nullity{0};  // nullity[k] = dim ker b^k
  Matrix<T> bk = Matrix<T>::identity(n);
  const double b_norm = dense::singular_values(b).front();
  const double a_norm = b_norm + std::abs(lambda);
  while (nullity.back() < m) {
    const std::size_t k = nullity.size();
    if (k > m)
      throw StructureInconsistent("Weyr staircase for eigenvalue " + format_value(lambda) +
                                  " did not reach multiplicity " + std::to_string(m));
    bk = bk * b;
    const Vec<double> sigma = dense::singular_values(bk);
    // An eps-sized perturbation of A moves b^k by about k ||b||^(k-1) ||A|| eps.
    const double scale = std::max(
        sigma.front(), static_cast<double>(k) * std::pow(b_norm, static_cast<double>(k - 1)) * a_norm);
    auto count_below = [&](double threshold) {
      return static_cast<std::size_t>(
          std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s <= threshold; }));
    };
    std::size_t d = count_below(tol.rank_for(n, scale));
    // Rounding in the entries of A, amplified by the conditioning of its
    // Jordan basis, can sit a little above n eps. When the default threshold
    // stalls the staircase, retry at sqrt(eps).
    if (d <= nullity.back() && !tol.rank)
      d = count_below(static_cast<double>(n) * std::sqrt(dense::kEps) * scale);
    // lambda is an eigenvalue, so the kernel is never trivial.
    d = std::max<std::size_t>(d, std::max<std::size_t>(nullity.back(), 1));
    const std::size_t prev = nullity.back();
    if (d > m || d == prev)
      throw StructureInconsistent(
          "rank staircase for eigenvalue " + format_value(lambda) + " gives nullity " +
          std::to_string(d) + " at power " + std::to_string(k) + " (multiplicity " +
          std::to_string(m) + "); adjust the cluster or rank tolerance");
    if (k >= 2 && d - prev > prev - nullity[k - 2])
      throw StructureInconsistent("rank staircase for eigenvalue " + format_value(lambda) +
                                  " is not a Weyr characteristic");
    nullity.push_back(d);
  }
  // at_least[k] = #blocks of size >= k.
  std::vector<std::size_t> sizes;
  const std::size_t top = nullity.size() - 1;
  for (std::size_t k = top; k >= 1; --k) {
    const std::size_t ge_k = nullity[k] - nullity[k - 1];
    const std::size_t ge_next = k < top ? nullity[k + 1] - nullity[k] : 0;
    for (std::size_t c = 0; c < ge_k - ge_next; ++c) sizes.push_back(k);
  }
  return sizes;
}

std::vector<std::size_t> block_sizes_for(const RealMatrix& a, Complex lambda, std::size_t m,
                                         const Tolerances& tol) {
  if (lambda.imag() == 0.0) return weyr_block_sizes(shifted(a, lambda.real()), m, tol, lambda);
  return weyr_block_sizes(shifted(a, lambda), m, tol, lambda);
}

template <typename T>
Columns<T> top_columns(const Columns<T>& cols, std::size_t count) {
  if (count == 0) return {};
  auto svd = dense::jacobi_svd(cols);
  svd.u.resize(count);
  return svd.u;
}

template <typename T>
Vec<T> combine(const Columns<T>& cols, const Vec<T>& coeffs) {
  Vec<T> out(cols.front().size(), T{});
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeffs[j] * cols[j][i];
  return out;
}

template <typename T>
T random_scalar(std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  if constexpr (is_complex<T>::value) return T(dist(rng), dist(rng));
  else return dist(rng);
}

// Jordan chains for one eigenvalue. `b` = A - lambda I; `sizes` descending.
// Returns the chain vectors block by block, each block ordered
// (b^(r-1) u, ..., b u, u).
template <typename T>
Columns<T> chains_for(const Matrix<T>& b, const std::vector<std::size_t>& sizes,
                      const Tolerances& tol, std::mt19937_64* rng) {
  const std::size_t n = b.size();
  const std::size_t maxr = sizes.front();
  std::vector<Matrix<T>> pow{Matrix<T>::identity(n)};
  for (std::size_t k = 1; k <= maxr; ++k) pow.push_back(pow.back() * b);

  auto nullity = [&](std::size_t k) {
    std::size_t d = 0;
    for (std::size_t s : sizes) d += std::min(s, k);
    return d;
  };
  std::vector<Columns<T>> kernel(maxr + 1);
  for (std::size_t k = 1; k <= maxr; ++k) kernel[k] = dense::null_space(pow[k], nullity(k));

  struct Chain {
    std::size_t size;
    Vec<T> generator;
  };
  std::vector<Chain> chains;
  const double threshold = std::max(tol.rank_for(n, 1.0), 1e3 * dense::kEps);

  for (std::size_t r = maxr; r >= 1; --r) {
    const auto count = static_cast<std::size_t>(std::count(sizes.begin(), sizes.end(), r));
    if (count == 0) continue;

    // Everything the new generators must avoid: ker b^(r-1) plus the level-r
    // vectors of the longer chains already chosen.
    Columns<T> avoid = kernel[r - 1];
    for (const Chain& c : chains) avoid.push_back(dense::apply(pow[c.size - r], c.generator));
    const Columns<T> q = top_columns(avoid, avoid.size());

    const Columns<T>& cand = kernel[r];
    Columns<T> projected = cand;
    for (auto& col : projected)
      for (const auto& qv : q) {
        const T coef = dense::dot(qv, col);
        for (std::size_t i = 0; i < n; ++i) col[i] -= coef * qv[i];
      }

    std::vector<Vec<T>> coeffs;
    if (rng == nullptr) {
      const auto svd = dense::jacobi_svd(projected);
      if (svd.sigma.size() < count || svd.sigma[count - 1] <= threshold)
        throw ChainFailure("no admissible Jordan chain generator for block size " +
                           std::to_string(r));
      for (std::size_t i = 0; i < count; ++i) coeffs.push_back(svd.v[i]);
    } else {
      Columns<T> mixed;
      for (std::size_t i = 0; i < count; ++i) {
        Vec<T> g(cand.size());
        for (auto& x : g) x = random_scalar<T>(*rng);
        mixed.push_back(combine(projected, g));
        coeffs.push_back(std::move(g));
      }
      const auto svd = dense::jacobi_svd(mixed);
      if (svd.sigma.back() <= threshold * svd.sigma.front())
        throw ChainFailure("random Jordan chain generators are degenerate for block size " +
                           std::to_string(r));
    }
    for (const auto& g : coeffs) {
      Vec<T> u = combine(cand, g);
      const double nrm = dense::norm2(u);
      for (auto& x : u) x /= nrm;
      chains.push_back({r, std::move(u)});
    }
    if (r == 1) break;
  }

  Columns<T> out;
  for (const Chain& c : chains)
    for (std::size_t k = c.size; k-- > 0;) out.push_back(dense::apply(pow[k], c.generator));
  return out;
}

Columns<Complex> to_complex_columns(const Columns<double>& cols) {
  Columns<Complex> out;
  for (const auto& c : cols) out.emplace_back(c.begin(), c.end());
  return out;
}

Columns<Complex> conjugate(Columns<Complex> cols) {
  for (auto& c : cols)
    for (auto& x : c) x = std::conj(x);
  return cols;
}

// Chain columns for every block of `s`, in block order. Blocks with
// negative imaginary part are skipped when `upper_only`.
Columns<Complex> chain_columns(const RealMatrix& a, const JordanStructure& s, const Tolerances& tol,
                               const ChainOptions& opts, bool upper_only) {
  std::optional<std::mt19937_64> rng;
  if (opts.seed) rng.emplace(*opts.seed);

  // Group block indices by eigenvalue, preserving first-appearance order.
  std::vector<Complex> keys;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const Complex z = s.blocks[i].eigenvalue;
    auto it = std::find(keys.begin(), keys.end(), z);
    if (it == keys.end()) {
      keys.push_back(z);
      members.push_back({i});
    } else {
      members[static_cast<std::size_t>(it - keys.begin())].push_back(i);
    }
  }

  std::vector<Columns<Complex>> per_block(s.blocks.size());
  for (std::size_t g = 0; g < keys.size(); ++g) {
    const Complex lambda = keys[g];
    if (upper_only && lambda.imag() < 0) continue;
    auto idx = members[g];
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return s.blocks[x].size > s.blocks[y].size; });
    std::vector<std::size_t> sizes;
    for (std::size_t i : idx) sizes.push_back(s.blocks[i].size);

    Columns<Complex> cols;
    if (lambda.imag() == 0.0)
      cols = to_complex_columns(
          chains_for(shifted(a, lambda.real()), sizes, tol, rng ? &*rng : nullptr));
    else if (lambda.imag() > 0)
      cols = chains_for(shifted(a, lambda), sizes, tol, rng ? &*rng : nullptr);
    else
      cols = conjugate(chains_for(shifted(a, std::conj(lambda)), sizes, tol, rng ? &*rng : nullptr));

    std::size_t pos = 0;
    for (std::size_t i : idx) {
      const std::size_t r = s.blocks[i].size;
      per_block[i].assign(cols.begin() + static_cast<std::ptrdiff_t>(pos),
                          cols.begin() + static_cast<std::ptrdiff_t>(pos + r));
      pos += r;
    }
  }

  Columns<Complex> out;
  for (const auto& cols : per_block) out.insert(out.end(), cols.begin(), cols.end());
  return out;
}

template <typename T>
double reconstruction_residual(const RealMatrix& a, const Matrix<T>& p, const Matrix<T>& j,
                               const Tolerances& tol) {
  Matrix<T> p_inv;
  try {
    p_inv = inverse(p, Tolerances{std::nullopt, std::nullopt, tol.residual});
  } catch (const Singular&) {
    throw ChainFailure("Jordan chain basis is singular");
  }
  const Matrix<T> rebuilt = p * j * p_inv;
  if constexpr (is_complex<T>::value) return relative_difference(to_complex(a), rebuilt);
  else return relative_difference(a, rebuilt);
}

void check_residual(const char* what, double residual, const Tolerances& tol) {
  if (!(residual <= tol.residual)) throw ResidualExceeded(what, residual, tol.residual);
}

RealMatrix cell(double lambda, double mu) { return RealMatrix{{lambda, -mu}, {mu, lambda}}; }

// Block-diagonal part of a real Jordan matrix (drops the superdiagonal ones
// and identity cells).
RealMatrix semisimple_part(const JordanStructure& s) {
  RealMatrix d(s.n);
  std::size_t off = 0;
  for (const auto& b : s.blocks) {
    if (b.kind == BlockKind::Simple) {
      for (std::size_t i = 0; i < b.size; ++i) d(off + i, off + i) = b.eigenvalue.real();
    } else {
      const RealMatrix l = cell(b.eigenvalue.real(), b.eigenvalue.imag());
      for (std::size_t k = 0; k < b.size; ++k) set_block(d, off + 2 * k, l);
    }
    off += b.dimension();
  }
  return d;
}

}  // namespace

std::string describe_blocks(const std::vector<BlockCount>& blocks) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) os << ", ";
    os << "(" << blocks[i].eigenvalue << ", size " << blocks[i].size << ", count "
       << blocks[i].count << ")";
  }
  return os.str();
}

std::vector<JordanStructure::Group> JordanStructure::groups() const {
  std::vector<Group> out;
  for (const auto& b : blocks) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Group& g) {
      return g.eigenvalue == b.eigenvalue && g.size == b.size && g.kind == b.kind;
    });
    if (it == out.end()) out.push_back({b.eigenvalue, b.size, 1, b.kind});
    else ++it->count;
  }
  return out;
}

ComplexMatrix jordan_matrix(const JordanStructure& s) {
  ComplexMatrix j(s.n);
  std::size_t off = 0;
  for (const auto& b : s.blocks) {
    if (b.kind != BlockKind::Simple)
      throw std::invalid_argument("jordan_matrix expects Simple blocks only");
    for (std::size_t i = 0; i < b.size; ++i) {
      j(off + i, off + i) = b.eigenvalue;
      if (i + 1 < b.size) j(off + i, off + i + 1) = 1.0;
    }
    off += b.size;
  }
  return j;
}

RealMatrix real_jordan_matrix(const JordanStructure& s) {
  RealMatrix j = semisimple_part(s);
  std::size_t off = 0;
  for (const auto& b : s.blocks) {
    if (b.kind == BlockKind::Simple && b.eigenvalue.imag() != 0.0)
      throw std::invalid_argument("real Jordan matrix needs real Simple blocks");
    const std::size_t step = b.kind == BlockKind::Paired ? 2 : 1;
    for (std::size_t i = 0; i + step < b.dimension(); ++i) j(off + i, off + i + step) = 1.0;
    off += b.dimension();
  }
  return j;
}

JordanStructure jordan_structure(const RealMatrix& a, const Tolerances& tol) {
  JordanStructure s{{}, a.size()};
  for (const Eigenvalue& e : eigenvalues(a, tol)) {
    if (e.value.imag() < 0) continue;
    for (std::size_t r : block_sizes_for(a, e.value, e.multiplicity, tol)) {
      s.blocks.push_back({e.value, r, BlockKind::Simple});
      if (e.value.imag() > 0) s.blocks.push_back({std::conj(e.value), r, BlockKind::Simple});
    }
  }
  std::stable_sort(s.blocks.begin(), s.blocks.end(), block_less);
  return s;
}

ComplexJordanForm jordan_chains(const RealMatrix& a, const JordanStructure& structure,
                                const Tolerances& tol, const ChainOptions& opts) {
  tol.validate();
  ComplexJordanForm form;
  form.structure = structure;
  form.p = dense::from_columns(chain_columns(a, structure, tol, opts, false));
  form.residual = reconstruction_residual(a, form.p, jordan_matrix(structure), tol);
  check_residual("complex Jordan form", form.residual, tol);
  return form;
}

RealJordanForm real_jordan_form(const RealMatrix& a, const Tolerances& tol,
                                const ChainOptions& opts) {
  tol.validate();
  const JordanStructure cs = jordan_structure(a, tol);
  const Columns<Complex> cols = chain_columns(a, cs, tol, opts, true);

  struct Piece {
    JordanBlockSpec spec;
    Columns<double> cols;
  };
  std::vector<Piece> pieces;
  std::size_t off = 0;
  for (const auto& b : cs.blocks) {
    if (b.eigenvalue.imag() < 0) continue;
    Piece piece;
    if (b.eigenvalue.imag() == 0.0) {
      piece.spec = {b.eigenvalue, b.size, BlockKind::Simple};
      for (std::size_t k = 0; k < b.size; ++k) {
        Vec<double> re(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) re[i] = cols[off + k][i].real();
        piece.cols.push_back(std::move(re));
      }
    } else {
      piece.spec = {b.eigenvalue, b.size, BlockKind::Paired};
      for (std::size_t k = 0; k < b.size; ++k) {
        Vec<double> re(a.size()), im(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
          re[i] = cols[off + k][i].real();
          im[i] = cols[off + k][i].imag();
        }
        piece.cols.push_back(std::move(im));
        piece.cols.push_back(std::move(re));
      }
    }
    off += b.size;
    pieces.push_back(std::move(piece));
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& x, const Piece& y) { return block_less(x.spec, y.spec); });

  RealJordanForm form;
  form.structure.n = a.size();
  Columns<double> all;
  for (auto& piece : pieces) {
    form.structure.blocks.push_back(piece.spec);
    all.insert(all.end(), piece.cols.begin(), piece.cols.end());
  }
  form.p = dense::from_columns(all);
  form.residual = reconstruction_residual(a, form.p, real_jordan_matrix(form.structure), tol);
  check_residual("real Jordan form", form.residual, tol);
  return form;
}

std::vector<BlockCount> parity_violations(const JordanStructure& s) {
  std::vector<BlockCount> out;
  for (const auto& g : s.groups()) {
    if (g.kind != BlockKind::Simple || g.eigenvalue.imag() != 0.0 || !(g.eigenvalue.real() < 0))
      continue;
    if (g.count % 2 == 1) out.push_back({g.eigenvalue.real(), g.size, g.count});
  }
  return out;
}

RealJordanForm pair_negative_blocks(const RealJordanForm& form) {
  if (auto bad = parity_violations(form.structure); !bad.empty()) throw ParityViolation(bad);

  const auto& blocks = form.structure.blocks;
  std::vector<std::size_t> offset(blocks.size());
  for (std::size_t i = 0, off = 0; i < blocks.size(); off += blocks[i].dimension(), ++i)
    offset[i] = off;

  const Columns<double> pcols = dense::columns_of(form.p);
  RealJordanForm out;
  out.structure.n = form.structure.n;
  Columns<double> cols;
  std::vector<bool> used(blocks.size(), false);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const auto& b = blocks[i];
    const bool negative =
        b.kind == BlockKind::Simple && b.eigenvalue.imag() == 0.0 && b.eigenvalue.real() < 0;
    if (!negative) {
      out.structure.blocks.push_back(b);
      for (std::size_t k = 0; k < b.dimension(); ++k) cols.push_back(pcols[offset[i] + k]);
      continue;
    }
    std::size_t twin = i + 1;
    while (twin < blocks.size() &&
           (used[twin] || blocks[twin].kind != BlockKind::Simple ||
            blocks[twin].eigenvalue != b.eigenvalue || blocks[twin].size != b.size))
      ++twin;
    used[twin] = true;  // parity check guarantees a twin exists
    out.structure.blocks.push_back({b.eigenvalue, b.size, BlockKind::Paired});
    for (std::size_t k = 0; k < b.size; ++k) {
      cols.push_back(pcols[offset[i] + k]);
      cols.push_back(pcols[offset[twin] + k]);
    }
  }
  out.p = dense::from_columns(cols);

  // The permutation is exact, so the reconstruction changes only by the
  // roundoff of the second inverse.
  const RealMatrix before = form.p * real_jordan_matrix(form.structure) * inverse(form.p);
  const RealMatrix after = out.p * real_jordan_matrix(out.structure) * inverse(out.p);
  out.residual = form.residual + relative_difference(before, after);
  return out;
}

AdditiveJordan additive_jordan_decomposition(const RealMatrix& a, const Tolerances& tol,
                                             const ChainOptions& opts) {
  const RealJordanForm form = real_jordan_form(a, tol, opts);
  RealMatrix s = form.p * semisimple_part(form.structure) * inverse(form.p);
  RealMatrix n = a - s;
  return {std::move(s), std::move(n)};
}

MultiplicativeJordan multiplicative_jordan_decomposition(const RealMatrix& a,
                                                         const Tolerances& tol) {
  const RealJordanForm form = real_jordan_form(a, tol);
  const double ctol = tol.cluster_for(a);
  for (const auto& b : form.structure.blocks)
    if (std::abs(b.eigenvalue) <= ctol)
      throw Singular("multiplicative Jordan decomposition needs an invertible matrix");

  const RealMatrix d = semisimple_part(form.structure);
  const RealMatrix p_inv = inverse(form.p);
  RealMatrix d_inv(a.size());
  std::size_t off = 0;
  for (const auto& b : form.structure.blocks) {
    if (b.kind == BlockKind::Simple) {
      for (std::size_t i = 0; i < b.size; ++i) d_inv(off + i, off + i) = 1.0 / b.eigenvalue.real();
    } else {
      const double lam = b.eigenvalue.real(), mu = b.eigenvalue.imag();
      const double rho2 = lam * lam + mu * mu;
      const RealMatrix l_inv = cell(lam / rho2, -mu / rho2);
      for (std::size_t k = 0; k < b.size; ++k) set_block(d_inv, off + 2 * k, l_inv);
    }
    off += b.dimension();
  }
  RealMatrix s = form.p * d * p_inv;
  const RealMatrix n = a - s;
  RealMatrix u = RealMatrix::identity(a.size()) + form.p * d_inv * p_inv * n;
  return {std::move(s), std::move(u)};
}

}  // namespace matfn
