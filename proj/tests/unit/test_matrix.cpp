#include <gtest/gtest.h>

#include "pdq/errors.hpp"
#include "pdq/matrix.hpp"
#include "support.hpp"

using namespace pdq;

TEST(DenseMatrix, ConstructsRowMajor) {
  const DenseMatrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 0), 4.0);
  EXPECT_EQ(m.data()[2], 3.0);
  EXPECT_EQ(m.row(1)[2], 6.0);
}

TEST(DenseMatrix, RejectsWrongDataLength) {
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), InvalidArgument);
  EXPECT_THROW((DenseMatrix{{1, 2}, {3}}), InvalidArgument);
}

TEST(DenseMatrix, IdentityEyeAndDiagonal) {
  const auto i3 = DenseMatrix::identity(3);
  EXPECT_EQ(i3, (DenseMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(DenseMatrix::eye(3, 2), (DenseMatrix{{1, 0}, {0, 1}, {0, 0}}));
  const std::vector<double> d{2, 3};
  EXPECT_EQ(DenseMatrix::diagonal(d), (DenseMatrix{{2, 0}, {0, 3}}));
}

TEST(DenseMatrix, TransposeAndSlices) {
  const DenseMatrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.transpose(), (DenseMatrix{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_EQ(m.leading_cols(2), (DenseMatrix{{1, 2}, {4, 5}}));
  EXPECT_EQ(m.leading_rows(1), (DenseMatrix{{1, 2, 3}}));
  EXPECT_THROW(m.leading_cols(4), InvalidArgument);
}

TEST(DenseMatrix, Arithmetic) {
  const DenseMatrix a{{1, 2}, {3, 4}};
  const DenseMatrix b{{1, 1}, {1, 1}};
  EXPECT_EQ(a + b, (DenseMatrix{{2, 3}, {4, 5}}));
  EXPECT_EQ(a - b, (DenseMatrix{{0, 1}, {2, 3}}));
  EXPECT_EQ(2.0 * a, (DenseMatrix{{2, 4}, {6, 8}}));
  DenseMatrix c(3, 1);
  EXPECT_THROW(c += a, InvalidArgument);
}

TEST(DenseMatrix, FiniteCheck) {
  DenseMatrix m(2, 2, 1.0);
  EXPECT_TRUE(m.all_finite());
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(m.all_finite());
}

TEST(SparseMatrix, TripletsSortSumAndDropZeros) {
  const auto s = SparseMatrix::from_triplets(
      3, 3, {{2, 1, 1.0}, {0, 2, 2.0}, {0, 0, 3.0}, {2, 1, 4.0}, {1, 1, 0.0}, {1, 2, 1.0}, {1, 2, -1.0}});
  EXPECT_EQ(s.nnz(), 3u);
  const std::vector<Index> offsets(s.row_offsets().begin(), s.row_offsets().end());
  const std::vector<Index> cols(s.col_indices().begin(), s.col_indices().end());
  const std::vector<double> vals(s.values().begin(), s.values().end());
  EXPECT_EQ(offsets, (std::vector<Index>{0, 2, 2, 3}));
  EXPECT_EQ(cols, (std::vector<Index>{0, 2, 1}));
  EXPECT_EQ(vals, (std::vector<double>{3.0, 2.0, 5.0}));
}

TEST(SparseMatrix, DropTolerance) {
  const auto s = SparseMatrix::from_triplets(2, 2, {{0, 0, 1e-9}, {1, 1, 1.0}}, 1e-8);
  EXPECT_EQ(s.nnz(), 1u);
  const DenseMatrix d{{1e-9, 0}, {0, 2}};
  EXPECT_EQ(SparseMatrix::from_dense(d).nnz(), 2u);
  EXPECT_EQ(SparseMatrix::from_dense(d, 1e-8).nnz(), 1u);
}

TEST(SparseMatrix, RejectsOutOfRangeTriplet) {
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), InvalidArgument);
}

TEST(SparseMatrix, FromCsrValidatesInvariants) {
  EXPECT_NO_THROW(SparseMatrix::from_csr(2, 3, {0, 1, 3}, {1, 0, 2}, {1, 2, 3}));
  EXPECT_THROW(SparseMatrix::from_csr(2, 3, {0, 1}, {1}, {1}), InvalidArgument);              // offsets length
  EXPECT_THROW(SparseMatrix::from_csr(2, 3, {0, 2, 1}, {0, 1}, {1, 2}), InvalidArgument);      // decreasing
  EXPECT_THROW(SparseMatrix::from_csr(2, 3, {0, 2, 2}, {1, 1}, {1, 2}), InvalidArgument);      // repeated col
  EXPECT_THROW(SparseMatrix::from_csr(2, 3, {0, 1, 1}, {3}, {1}), InvalidArgument);            // col range
  EXPECT_THROW(SparseMatrix::from_csr(2, 3, {0, 1, 1}, {0}, {0.0}), InvalidArgument);          // stored zero
  EXPECT_THROW(SparseMatrix::from_csr(2, 3, {0, 1, 2}, {0, 1}, {1.0}), InvalidArgument);       // value count
}

TEST(SparseMatrix, DenseRoundTrip) {
  pdq::testing::Cases cases(5);
  for (int t = 0; t < 20; ++t) {
    const Index r = cases.size(1, 12), c = cases.size(1, 12);
    DenseMatrix d = cases.matrix(r, c);
    for (double& v : d.data())
      if (cases.uniform(0, 1) < 0.6) v = 0.0;
    const auto s = SparseMatrix::from_dense(d);
    EXPECT_EQ(s.to_dense(), d);
    std::size_t nz = 0;
    for (double v : d.data()) nz += v != 0.0;
    EXPECT_EQ(s.nnz(), nz);
    EXPECT_DOUBLE_EQ(s.density(), static_cast<double>(nz) / static_cast<double>(r * c));
  }
}
