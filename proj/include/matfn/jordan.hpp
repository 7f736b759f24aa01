#pragma once

// Jordan structure, Jordan chains, real Jordan forms and the additive /
// multiplicative Jordan decompositions of a real matrix.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "matfn/errors.hpp"
#include "matfn/linalg.hpp"
#include "matfn/matrix.hpp"

namespace matfn {

enum class BlockKind {
  /// J_r(alpha): r x r, alpha on the diagonal, ones on the superdiagonal.
  /// In a real form alpha is real; in a complex structure it may be complex.
  Simple,
  /// J_2r(lambda, mu): 2r x 2r, cells L(lambda, mu) = [[lambda, -mu], [mu, lambda]]
  /// on the diagonal and 2x2 identities on the block superdiagonal.
  /// mu > 0 for a conjugate pair; mu == 0 only for two merged copies of
  /// J_r(lambda) with lambda < 0.
  Paired,
};

struct JordanBlockSpec {
  Complex eigenvalue;  // for Paired: (lambda, mu)
  std::size_t size = 1;  // r; a Paired block occupies 2r rows
  BlockKind kind = BlockKind::Simple;

  std::size_t dimension() const { return kind == BlockKind::Paired ? 2 * size : size; }
};

struct JordanStructure {
  std::vector<JordanBlockSpec> blocks;
  std::size_t n = 0;

  /// Identical blocks grouped as (eigenvalue, size, count), in block order.
  struct Group {
    Complex eigenvalue;
    std::size_t size;
    std::size_t count;
    BlockKind kind;
  };
  std::vector<Group> groups() const;
};

/// Block-diagonal complex Jordan matrix for a structure of Simple blocks.
ComplexMatrix jordan_matrix(const JordanStructure& s);
/// Block-diagonal real Jordan matrix (Simple blocks must have real eigenvalues).
RealMatrix real_jordan_matrix(const JordanStructure& s);

struct ComplexJordanForm {
  ComplexMatrix p;
  JordanStructure structure;
  double residual = 0.0;  // ||A - P J P^-1||_1 / ||A||_1
};

struct RealJordanForm {
  RealMatrix p;
  JordanStructure structure;
  double residual = 0.0;
};

/// Elementary divisors of A from the Weyr staircase
/// #{blocks of size >= k} = rank((A - lambda I)^(k-1)) - rank((A - lambda I)^k).
/// Blocks are sorted by (Re, Im, size descending); complex eigenvalues of a
/// real matrix appear once per conjugate, all blocks are Simple.
JordanStructure jordan_structure(const RealMatrix& a, const Tolerances& tol = {});

struct ChainOptions {
  /// When set, chain generators are random combinations of admissible
  /// vectors instead of the best-separated ones. Used to probe uniqueness.
  std::optional<std::uint64_t> seed;
};

/// Columns of P are Jordan chains ((A - lambda I)^(r-1) u, ..., u) in the
/// order of `structure`. Throws ChainFailure if no admissible generator exists.
ComplexJordanForm jordan_chains(const RealMatrix& a, const JordanStructure& structure,
                                const Tolerances& tol = {}, const ChainOptions& opts = {});

/// Real Jordan form: conjugate chain pairs become Paired blocks with cells
/// in the L(lambda, mu) convention (basis ordered (Im w, Re w) per vector).
RealJordanForm real_jordan_form(const RealMatrix& a, const Tolerances& tol = {},
                                const ChainOptions& opts = {});

/// Replaces each pair of identical J_r(alpha), alpha < 0, by J_2r(alpha, 0)
/// using the interleaving permutation. Throws ParityViolation listing every
/// (alpha, r, count) with odd count.
RealJordanForm pair_negative_blocks(const RealJordanForm& form);

/// Odd-count negative-eigenvalue block groups of a structure (empty when the
/// parity condition holds).
std::vector<BlockCount> parity_violations(const JordanStructure& s);

struct AdditiveJordan {
  RealMatrix semisimple;  // S
  RealMatrix nilpotent;   // N
};

/// A = S + N with S semisimple, N nilpotent, SN = NS.
AdditiveJordan additive_jordan_decomposition(const RealMatrix& a, const Tolerances& tol = {},
                                             const ChainOptions& opts = {});

struct MultiplicativeJordan {
  RealMatrix semisimple;  // S
  RealMatrix unipotent;   // U
};

/// A = SU = US with S semisimple and U unipotent. Throws Singular if A is
/// not invertible.
MultiplicativeJordan multiplicative_jordan_decomposition(const RealMatrix& a,
                                                         const Tolerances& tol = {});

}  // namespace matfn
