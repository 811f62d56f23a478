#include <gtest/gtest.h>

#include <cmath>

#include "pdq/errors.hpp"
#include "pdq/generate.hpp"
#include "pdq/linalg.hpp"
#include "support.hpp"

using namespace pdq;

TEST(Generate, LowRankHasNumericalRank) {
  const DenseMatrix a = gen::low_rank(500, 500, 50, 1);
  const Eigen::VectorXd s = pdq::testing::oracle_singular_values(a);
  EXPECT_GT(s(49) / s(0), 1e-6);
  EXPECT_LE(s(50) / s(0), 1e-12);
}

TEST(Generate, IllConditionedHitsKappa) {
  const DenseMatrix a = gen::ill_conditioned(80, 1e6, 2);
  const Eigen::VectorXd s = pdq::testing::oracle_singular_values(a);
  EXPECT_NEAR(s(0) / s(79), 1e6, 1e4);
  EXPECT_NEAR(condition_number(a), 1e6, 1e4);
}

TEST(Generate, SparseDensity) {
  const SparseMatrix s = gen::sparse(100, 100, 0.10, 3);
  EXPECT_NEAR(s.density(), 0.10, 0.02);
  const SparseMatrix big = gen::sparse(1000, 1000, 0.10, 3);
  EXPECT_NEAR(big.density(), 0.10, 0.005);
}

TEST(Generate, DiagDominant) {
  const DenseMatrix a = gen::diag_dominant(20, 4);
  for (Index i = 0; i < 20; ++i) {
    double off = 0.0;
    for (Index j = 0; j < 20; ++j)
      if (j != i) off += std::abs(a(i, j));
    EXPECT_DOUBLE_EQ(a(i, i), 1.0 + off);
  }
}

TEST(Generate, SpdIsSymmetricPositiveDefinite) {
  const DenseMatrix a = gen::spd(12, 5);
  EXPECT_EQ(a, a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(pdq::testing::to_eigen(a));
  EXPECT_GT(e.eigenvalues().minCoeff(), 0.0);
}

TEST(Generate, RandomOrthogonal) {
  const DenseMatrix q = gen::random_orthogonal(15, 6);
  EXPECT_LE(orthonormality_error(q), 1e-12);
  EXPECT_LE(orthonormality_error(q.transpose()), 1e-12);
}

TEST(Generate, WithSingularValues) {
  const std::vector<double> sigma{5, 3, 1};
  const DenseMatrix a = gen::with_singular_values(7, 4, sigma, 8);
  const Eigen::VectorXd s = pdq::testing::oracle_singular_values(a);
  EXPECT_NEAR(s(0), 5, 1e-12);
  EXPECT_NEAR(s(1), 3, 1e-12);
  EXPECT_NEAR(s(2), 1, 1e-12);
  EXPECT_NEAR(s(3), 0, 1e-12);
}

TEST(Generate, SeededAndDeterministic) {
  EXPECT_EQ(gen::low_rank(10, 8, 2, 3), gen::low_rank(10, 8, 2, 3));
  EXPECT_NE(gen::low_rank(10, 8, 2, 3), gen::low_rank(10, 8, 2, 4));
  EXPECT_EQ(gen::sparse(30, 30, 0.2, 1), gen::sparse(30, 30, 0.2, 1));
}

TEST(Generate, DispatchAndValidation) {
  gen::Params p;
  p.kind = gen::Kind::low_rank;
  p.rows = 10;
  p.rank = 3;
  const auto m = gen::generate(p);
  ASSERT_TRUE(std::holds_alternative<DenseMatrix>(m));
  EXPECT_EQ(std::get<DenseMatrix>(m).cols(), 10u);
  p.rank = 11;
  EXPECT_THROW(gen::generate(p), InvalidArgument);
  p = {};
  p.rows = 10;
  p.density = 0.0;
  EXPECT_THROW(gen::generate(p), InvalidArgument);
  p.density = 1.5;
  EXPECT_THROW(gen::generate(p), InvalidArgument);
  p.density = 0.5;
  EXPECT_TRUE(std::holds_alternative<SparseMatrix>(gen::generate(p)));
  p.kind = gen::Kind::ill_conditioned;
  p.kappa = 0.5;
  EXPECT_THROW(gen::generate(p), InvalidArgument);
  EXPECT_EQ(gen::parse_kind("low-rank"), gen::Kind::low_rank);
  EXPECT_EQ(gen::parse_kind("diag-dominant"), gen::Kind::diag_dominant);
  EXPECT_THROW(gen::parse_kind("banded"), InvalidArgument);
}
