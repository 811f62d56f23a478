#include "pdq/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdq/errors.hpp"

namespace pdq {

DenseMatrix::DenseMatrix(Index rows, Index cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("DenseMatrix: data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidArgument("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(Index n) { return eye(n, n); }

DenseMatrix DenseMatrix::eye(Index rows, Index cols) {
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < std::min(rows, cols); ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
  DenseMatrix m(values.size(), values.size());
  for (Index i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::leading_cols(Index count) const {
  if (count > cols_) throw InvalidArgument("leading_cols: count exceeds column count");
  DenseMatrix m(rows_, count);
  for (Index i = 0; i < rows_; ++i)
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_), count, m.row(i).begin());
  return m;
}

DenseMatrix DenseMatrix::leading_rows(Index count) const {
  if (count > rows_) throw InvalidArgument("leading_rows: count exceeds row count");
  return DenseMatrix(count, cols_,
                     std::vector<double>(data_.begin(),
                                         data_.begin() + static_cast<std::ptrdiff_t>(count * cols_)));
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InvalidArgument("matrix addition: shape mismatch");
  for (Index i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InvalidArgument("matrix subtraction: shape mismatch");
  for (Index i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

SparseMatrix::SparseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets,
                                         double drop_tolerance) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols)
      throw InvalidArgument("sparse triplet (" + std::to_string(t.row) + "," +
                            std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(rows, cols);
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  Index k = 0;
  std::vector<Index> counts(rows, 0);
  while (k < triplets.size()) {
    const Index r = triplets[k].row;
    const Index c = triplets[k].col;
    double v = 0.0;
    while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) v += triplets[k++].value;
    if (std::abs(v) > drop_tolerance) {
      m.col_indices_.push_back(c);
      m.values_.push_back(v);
      ++counts[r];
    }
  }
  for (Index r = 0; r < rows; ++r) m.row_offsets_[r + 1] = m.row_offsets_[r] + counts[r];
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense, double drop_tolerance) {
  SparseMatrix m(dense.rows(), dense.cols());
  for (Index i = 0; i < dense.rows(); ++i) {
    for (Index j = 0; j < dense.cols(); ++j) {
      const double v = dense(i, j);
      if (std::abs(v) > drop_tolerance) {
        m.col_indices_.push_back(j);
        m.values_.push_back(v);
      }
    }
    m.row_offsets_[i + 1] = m.values_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::from_csr(Index rows, Index cols, std::vector<Index> row_offsets,
                                    std::vector<Index> col_indices, std::vector<double> values) {
  if (row_offsets.size() != rows + 1 || row_offsets.front() != 0)
    throw InvalidArgument("CSR: row offsets must have length rows+1 and start at 0");
  if (col_indices.size() != values.size() || row_offsets.back() != values.size())
    throw InvalidArgument("CSR: last offset must equal the number of stored values");
  for (Index r = 0; r < rows; ++r) {
    if (row_offsets[r + 1] < row_offsets[r] || row_offsets[r + 1] > values.size())
      throw InvalidArgument("CSR: offsets must be non-decreasing and within the value count");
    for (Index p = row_offsets[r]; p < row_offsets[r + 1]; ++p) {
      if (col_indices[p] >= cols) throw InvalidArgument("CSR: column index out of range");
      if (values[p] == 0.0) throw InvalidArgument("CSR: explicitly stored zero in row " + std::to_string(r));
      if (p > row_offsets[r] && col_indices[p] <= col_indices[p - 1])
        throw InvalidArgument("CSR: column indices not strictly increasing in row " +
                              std::to_string(r));
    }
  }
  SparseMatrix m(rows, cols);
  m.row_offsets_ = std::move(row_offsets);
  m.col_indices_ = std::move(col_indices);
  m.values_ = std::move(values);
  return m;
}

double SparseMatrix::density() const noexcept {
  const double total = static_cast<double>(rows_) * static_cast<double>(cols_);
  return total > 0 ? static_cast<double>(nnz()) / total : 0.0;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) d(i, col_indices_[p]) = values_[p];
  return d;
}

}  // namespace pdq
