#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "pdq/matrix.hpp"

namespace pdq::gen {

enum class Kind { sparse, low_rank, ill_conditioned, diag_dominant, spd };

std::string_view to_string(Kind kind) noexcept;
/// Accepts "sparse", "low-rank", "ill-conditioned", "diag-dominant", "spd".
Kind parse_kind(std::string_view name);

struct Params {
  Kind kind = Kind::sparse;
  Index rows = 0;
  Index cols = 0;  // 0 means square
  double density = 0.1;
  Index rank = 1;
  double kappa = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when the parameters do not fit the kind.
  void validate() const;
};

using AnyMatrix = std::variant<DenseMatrix, SparseMatrix>;

/// Dispatches on params.kind; only `sparse` yields a SparseMatrix.
AnyMatrix generate(const Params& params);

/// Each entry stored independently with probability `density`, values N(0, 1).
SparseMatrix sparse(Index rows, Index cols, double density, std::uint64_t seed);
/// X * Y with seeded Gaussian X (rows x rank) and Y (rank x cols).
DenseMatrix low_rank(Index rows, Index cols, Index rank, std::uint64_t seed);
/// low_rank plus i.i.d. N(0, noise^2) entries.
DenseMatrix low_rank_plus_noise(Index rows, Index cols, Index rank, double noise, std::uint64_t seed);
/// U diag(s) V^T with Haar-random orthogonal U, V and s geometric from 1 to 1/kappa.
DenseMatrix ill_conditioned(Index n, double kappa, std::uint64_t seed);
/// Off-diagonals uniform in (-1, 1); each diagonal is 1 + the absolute row sum.
DenseMatrix diag_dominant(Index n, std::uint64_t seed);
/// B^T B + 1e-6 I with Gaussian B, exactly symmetric.
DenseMatrix spd(Index n, std::uint64_t seed);
/// Haar-random n x n orthogonal matrix.
DenseMatrix random_orthogonal(Index n, std::uint64_t seed);
/// Matrix with the given singular values and Haar-random singular vectors.
DenseMatrix with_singular_values(Index rows, Index cols, std::span<const double> sigma,
                                 std::uint64_t seed);

}  // namespace pdq::gen
