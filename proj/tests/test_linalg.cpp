#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "matfn/dense.hpp"
#include "matfn/errors.hpp"
#include "matfn/linalg.hpp"
#include "test_util.hpp"

namespace matfn {
namespace {

using testing::Rng;

std::size_t total_multiplicity(const std::vector<Eigenvalue>& e) {
  std::size_t s = 0;
  for (const auto& x : e) s += x.multiplicity;
  return s;
}

TEST(Matrix, RejectsNonFiniteAndRagged) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(RealMatrix::from_rows({{1.0, inf}, {0.0, 1.0}}), InvalidMatrix);
  EXPECT_THROW(RealMatrix::from_rows({{1.0, 2.0}, {0.0}}), InvalidMatrix);
  EXPECT_THROW((RealMatrix{{1.0, std::nan("")}, {0.0, 1.0}}), InvalidMatrix);
}

TEST(Tolerances, RejectsNegativeValues) {
  EXPECT_THROW((Tolerances{-1.0, std::nullopt, 1e-10}.validate()), std::invalid_argument);
  EXPECT_THROW((Tolerances{std::nullopt, -1e-3, 1e-10}.validate()), std::invalid_argument);
  EXPECT_THROW((Tolerances{std::nullopt, std::nullopt, -1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(Tolerances{}.validate());
}

TEST(Eigenvalues, Diagonal) {
  const auto e = eigenvalues(RealMatrix::diagonal({2.0, 3.0}));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].value, Complex(2.0, 0.0));
  EXPECT_EQ(e[1].value, Complex(3.0, 0.0));
  EXPECT_EQ(e[0].multiplicity, 1u);
  EXPECT_EQ(e[1].multiplicity, 1u);
}

TEST(Eigenvalues, QuarterTurnGivesConjugatePair) {
  const auto e = eigenvalues(RealMatrix{{0.0, -1.0}, {1.0, 0.0}});
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(std::abs(e[0].value - Complex(0, -1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e[1].value - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_EQ(e[0].value, std::conj(e[1].value));
}

TEST(Eigenvalues, DefectiveBlockClustersAgainstPolynomialOracle) {
  const RealMatrix a{{2.0, 1.0}, {0.0, 2.0}};
  // Oracle: roots of det(X I - A) from Faddeev-LeVerrier + Durand-Kerner.
  const auto roots = testing::polynomial_roots(testing::characteristic_polynomial(a));
  for (Complex z : roots) EXPECT_NEAR(std::abs(z - 2.0), 0.0, 1e-6);

  const auto e = eigenvalues(a);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].multiplicity, 2u);
  EXPECT_EQ(e[0].value.imag(), 0.0);
  EXPECT_NEAR(e[0].value.real(), 2.0, 1e-14);
}

TEST(Eigenvalues, SnapsTinyImaginaryPartsToReal) {
  // Similar to J_2(3): QR returns a pair split by ~sqrt(eps).
  Rng rng(11);
  const RealMatrix a = testing::similar(rng, RealMatrix{{3.0, 1.0}, {0.0, 3.0}});
  const auto e = eigenvalues(a);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].multiplicity, 2u);
  EXPECT_EQ(e[0].value.imag(), 0.0);
  EXPECT_NEAR(e[0].value.real(), 3.0, 1e-12);
}

TEST(Eigenvalues, MatchPolynomialRootsOnRandomMatrices) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const RealMatrix a = testing::gaussian_matrix(rng, n);
    const auto roots = testing::polynomial_roots(testing::characteristic_polynomial(a));
    const auto e = eigenvalues(a);
    ASSERT_EQ(total_multiplicity(e), n);
    for (const auto& ev : e) {
      double best = 1e300;
      for (Complex z : roots) best = std::min(best, std::abs(z - ev.value));
      EXPECT_LT(best, 1e-8) << "trial " << trial;
    }
  }
}

TEST(Eigenvalues, SpectrumIsSimilarityInvariant) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const RealMatrix a = testing::similar(rng, testing::block_diagonal(testing::random_spectrum(rng, n)));
    const RealMatrix p = testing::well_conditioned(rng, n);
    const RealMatrix b = p * a * testing::oracle_inverse(p);
    const auto ea = eigenvalues(a), eb = eigenvalues(b);
    ASSERT_EQ(ea.size(), eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
      EXPECT_NEAR(std::abs(ea[i].value - eb[i].value), 0.0, 1e-8);
      EXPECT_EQ(ea[i].multiplicity, eb[i].multiplicity);
    }
  }
}

TEST(Eigenvalues, ProductEqualsDeterminant) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const RealMatrix a = testing::well_conditioned(rng, n, 10.0);
    Complex prod = 1.0;
    for (const auto& e : eigenvalues(a)) prod *= std::pow(e.value, static_cast<double>(e.multiplicity));
    // Oracle: constant term of the characteristic polynomial.
    const double det_oracle =
        (n % 2 == 0 ? 1.0 : -1.0) * testing::characteristic_polynomial(a).front();
    EXPECT_NEAR(prod.real(), det_oracle, 1e-8 * std::abs(det_oracle));
    EXPECT_NEAR(prod.imag(), 0.0, 1e-8 * std::abs(det_oracle));
    EXPECT_NEAR(determinant(a), det_oracle, 1e-8 * std::abs(det_oracle));
  }
}

TEST(RealSchur, ReconstructsAndIsQuasiTriangular) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const RealMatrix a = testing::gaussian_matrix(rng, n);
    const RealSchur s = real_schur(a);
    EXPECT_LT(relative_difference(a, s.q * s.t * s.q.transpose()), 1e-13);
    EXPECT_LT(testing::max_abs_diff(s.q.transpose() * s.q, RealMatrix::identity(n)), 1e-13);
    for (std::size_t i = 2; i < n; ++i)
      for (std::size_t j = 0; j + 1 < i; ++j) EXPECT_EQ(s.t(i, j), 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
      EXPECT_FALSE(s.t(i, i - 1) != 0.0 && s.t(i + 1, i) != 0.0) << "overlapping 2x2 blocks";
  }
}

TEST(RealSchur, ConvergesOnDefectiveSimilarityTransforms) {
  // Nearly equal eigenvalue pairs converge slowly without a cluster-aware
  // deflation test and a correctly centred exceptional shift.
  Rng rng(12345);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 7;
    std::vector<std::pair<double, std::size_t>> blocks;
    std::size_t k = 0;
    double lambda = testing::uniform(rng, -2.0, -1.5);
    while (k < n) {
      const std::size_t r = std::min<std::size_t>(1 + rng() % 2, n - k);
      blocks.emplace_back(lambda, r);
      lambda += testing::uniform(rng, 0.5, 0.8);
      k += r;
    }
    const RealMatrix a = testing::similar(rng, testing::jordan_block_matrix(blocks));
    EXPECT_NO_THROW(real_schur(a)) << "trial " << trial;
  }
}

TEST(Inverse, Examples) {
  EXPECT_EQ(inverse(RealMatrix::identity(3)), RealMatrix::identity(3));
  EXPECT_EQ(inverse(RealMatrix::diagonal({2.0, 4.0})), RealMatrix::diagonal({0.5, 0.25}));
}

TEST(Inverse, RandomRoundTrip) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5;
    const RealMatrix a = testing::well_conditioned(rng, n);
    const RealMatrix inv = inverse(a);
    EXPECT_LT(testing::max_abs_diff(a * inv, RealMatrix::identity(n)), 1e-12);
    EXPECT_LT(testing::max_abs_diff(inv * a, RealMatrix::identity(n)), 1e-12);
  }
}

TEST(Inverse, SingularThrows) {
  EXPECT_THROW(inverse(RealMatrix{{1.0, 2.0}, {2.0, 4.0}}), Singular);
  EXPECT_THROW(inverse(RealMatrix(3)), Singular);
  // An explicit rank tolerance is an absolute pivot threshold.
  EXPECT_THROW(inverse(RealMatrix::diagonal({1.0, 1e-3}), Tolerances{std::nullopt, 1e-2, 1e-10}),
               Singular);
}

TEST(OperatorNorm, Examples) {
  EXPECT_EQ(operator_norm(RealMatrix::identity(3)), 1.0);
  EXPECT_EQ(operator_norm(RealMatrix{{1.0, -2.0}, {3.0, 4.0}}), 6.0);
  EXPECT_EQ(operator_norm(ComplexMatrix{{Complex(3, 4), 0.0}, {0.0, 1.0}}), 5.0);
}

TEST(OperatorNorm, Submultiplicative) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const RealMatrix a = testing::gaussian_matrix(rng, n), b = testing::gaussian_matrix(rng, n);
    EXPECT_LE(operator_norm(a * b), operator_norm(a) * operator_norm(b));
  }
}

TEST(PolyEval, CubicMatchesDirectExpansion) {
  Rng rng(4);
  const RealMatrix a = testing::gaussian_matrix(rng, 4);
  const RealMatrix id = RealMatrix::identity(4);
  const RealMatrix direct = a * a * a - 2.0 * (a * a) + 3.0 * a - id;
  const RealMatrix horner = poly_eval(Polynomial{{-1.0, 3.0, -2.0, 1.0}}, a);
  EXPECT_LT(testing::max_abs_diff(direct, horner), 1e-12);
}

TEST(PolyEval, ConstantAndEmpty) {
  Rng rng(1);
  const RealMatrix a = testing::gaussian_matrix(rng, 3);
  EXPECT_EQ(poly_eval(Polynomial{{1.0}}, a), RealMatrix::identity(3));
  EXPECT_EQ(poly_eval(Polynomial{{2.5}}, a), 2.5 * RealMatrix::identity(3));
  EXPECT_EQ(poly_eval(Polynomial{}, a), RealMatrix(3));
}

TEST(PolyEval, CayleyHamilton) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix a = testing::gaussian_matrix(rng, 4);
    const RealMatrix z = poly_eval(Polynomial{testing::characteristic_polynomial(a)}, a);
    EXPECT_LT(z.max_abs(), 1e-10 * std::pow(operator_norm(a), 4));
  }
}

TEST(Dense, JacobiSvdReconstructsComplexMatrices) {
  Rng rng(6);
  std::normal_distribution<double> dist;
  ComplexMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  const auto svd = dense::jacobi_svd(dense::columns_of(m));
  // M = U S V^H
  ComplexMatrix u = dense::from_columns(svd.u), v = dense::from_columns(svd.v), s(4);
  for (std::size_t i = 0; i < 4; ++i) s(i, i) = svd.sigma[i];
  EXPECT_LT(relative_difference(m, u * s * v.adjoint()), 1e-14);
  for (std::size_t i = 0; i + 1 < 4; ++i) EXPECT_GE(svd.sigma[i], svd.sigma[i + 1]);
}

}  // namespace
}  // namespace matfn
