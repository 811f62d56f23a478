#pragma once

#include <cstdint>
#include <vector>

#include "pdq/matrix.hpp"

namespace pdq {

// Products. All throw InvalidArgument on inner-dimension mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b);
/// a^T * b without forming the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const SparseMatrix& a, const DenseMatrix& b);
/// a * b^T without forming the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const SparseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& a) noexcept;
double frobenius_norm(const SparseMatrix& a) noexcept;
double frobenius_norm_squared(const DenseMatrix& a) noexcept;
double frobenius_norm_squared(const SparseMatrix& a) noexcept;
/// Frobenius inner product sum_ij a_ij b_ij.
double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b);
/// Sum of |a_ij|.
double entrywise_l1(const DenseMatrix& a) noexcept;

/// Thin SVD: for an r x c input with p = min(r, c), U is r x p, Vt is p x c.
struct SvdResult {
  DenseMatrix u;
  std::vector<double> singular_values;  // non-increasing, non-negative
  DenseMatrix vt;
  std::size_t sweeps = 0;
  std::uint64_t rotations = 0;
};

/// One-sided (Hestenes) Jacobi SVD. Deterministic. Throws NumericalFailure
/// carrying the sweep count if the off-diagonal mass does not vanish in
/// kMaxJacobiSweeps sweeps.
SvdResult svd(const DenseMatrix& a);
inline constexpr std::size_t kMaxJacobiSweeps = 80;

/// sigma_max / sigma_min; +infinity when sigma_min < 1e-300.
double condition_number(const DenseMatrix& a);

struct QrResult {
  DenseMatrix q;  // rows x cols, orthonormal columns
  DenseMatrix r;  // cols x cols, upper triangular
  /// Columns whose |r_jj| fell below a rank tolerance.
  std::vector<Index> deficient_columns;
  bool rank_deficient() const noexcept { return !deficient_columns.empty(); }
};

/// Householder QR; requires rows >= cols.
QrResult qr(const DenseMatrix& a);

struct LuResult {
  std::vector<Index> permutation;  // row i of P*A is row permutation[i] of A
  DenseMatrix lower;               // unit lower triangular
  DenseMatrix upper;
  /// The permutation matrix P with P*A = L*U.
  DenseMatrix permutation_matrix() const;
};

/// Partial-pivoting LU of a square matrix. Throws SingularMatrix on an exactly
/// zero pivot.
LuResult lu(const DenseMatrix& a);
/// Solves A X = B with the factors of A.
DenseMatrix lu_solve(const LuResult& f, const DenseMatrix& b);

struct SymmetricEigen {
  std::vector<double> values;  // non-increasing
  DenseMatrix vectors;         // columns are eigenvectors
  std::uint64_t rotations = 0;
};

/// Cyclic two-sided Jacobi for symmetric input (only the upper triangle is read).
SymmetricEigen symmetric_eigen(const DenseMatrix& a);

/// Orthonormal polar factor U V^T of a tall matrix (rows >= cols), computed by
/// Householder QR followed by an SVD of the triangular factor.
struct PolarResult {
  DenseMatrix factor;
  std::size_t small_sweeps = 0;
  std::uint64_t small_rotations = 0;
};
PolarResult polar_factor(const DenseMatrix& a);

/// Largest absolute entry of a^T a - I; used to check orthonormal columns.
double orthonormality_error(const DenseMatrix& a);

}  // namespace pdq
