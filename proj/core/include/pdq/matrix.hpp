#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pdq {

using Index = std::size_t;

/// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, double fill = 0.0);
  DenseMatrix(Index rows, Index cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(Index n);
  /// n x k matrix whose leading min(n,k) diagonal entries are one.
  static DenseMatrix eye(Index rows, Index cols);
  static DenseMatrix diagonal(std::span<const double> values);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(Index i, Index j) noexcept { return data_[i * cols_ + j]; }
  double operator()(Index i, Index j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(Index i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(Index i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transpose() const;
  /// Columns [first, first + count).
  DenseMatrix leading_cols(Index count) const;
  DenseMatrix leading_rows(Index count) const;

  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

/// One stored entry used to assemble a SparseMatrix.
struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed-sparse-row matrix. Column indices within a row are strictly increasing.
class SparseMatrix {
 public:
  SparseMatrix() : row_offsets_(1, 0) {}
  SparseMatrix(Index rows, Index cols);

  /// Duplicates are summed; entries with |v| <= drop_tolerance are not stored.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets,
                                    double drop_tolerance = 0.0);
  static SparseMatrix from_dense(const DenseMatrix& dense, double drop_tolerance = 0.0);
  /// Validates the CSR invariants and throws InvalidArgument when they fail.
  static SparseMatrix from_csr(Index rows, Index cols, std::vector<Index> row_offsets,
                               std::vector<Index> col_indices, std::vector<double> values);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return values_.size(); }
  double density() const noexcept;

  std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Index> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  DenseMatrix to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_;
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

}  // namespace pdq
