#include "pdq/generate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdq/errors.hpp"
#include "pdq/linalg.hpp"
#include "pdq/random.hpp"

namespace pdq::gen {

std::string_view to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::sparse: return "sparse";
    case Kind::low_rank: return "low-rank";
    case Kind::ill_conditioned: return "ill-conditioned";
    case Kind::diag_dominant: return "diag-dominant";
    case Kind::spd: return "spd";
  }
  return "sparse";
}

Kind parse_kind(std::string_view name) {
  if (name == "sparse") return Kind::sparse;
  if (name == "low-rank") return Kind::low_rank;
  if (name == "ill-conditioned") return Kind::ill_conditioned;
  if (name == "diag-dominant") return Kind::diag_dominant;
  if (name == "spd") return Kind::spd;
  throw InvalidArgument("unknown generator kind '" + std::string(name) + "'");
}

void Params::validate() const {
  const Index c = cols ? cols : rows;
  if (rows == 0) throw InvalidArgument("generator size must be positive");
  switch (kind) {
    case Kind::sparse:
      if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
      break;
    case Kind::low_rank:
      if (rank < 1 || rank > std::min(rows, c))
        throw InvalidArgument("rank must satisfy 1 <= rank <= size");
      break;
    case Kind::ill_conditioned:
      if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be >= 1");
      [[fallthrough]];
    case Kind::diag_dominant:
    case Kind::spd:
      if (c != rows) throw InvalidArgument(std::string(to_string(kind)) + " matrices are square");
      break;
  }
}

AnyMatrix generate(const Params& params) {
  params.validate();
  const Index c = params.cols ? params.cols : params.rows;
  switch (params.kind) {
    case Kind::sparse: return sparse(params.rows, c, params.density, params.seed);
    case Kind::low_rank: return low_rank(params.rows, c, params.rank, params.seed);
    case Kind::ill_conditioned: return ill_conditioned(params.rows, params.kappa, params.seed);
    case Kind::diag_dominant: return diag_dominant(params.rows, params.seed);
    case Kind::spd: return spd(params.rows, params.seed);
  }
  throw InvalidArgument("unknown generator kind");
}

SparseMatrix sparse(Index rows, Index cols, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(density * static_cast<double>(rows * cols) * 1.1) + 16);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (rng.uniform() < density) {
        double v = rng.normal();
        if (v == 0.0) v = 1.0;
        entries.push_back({i, j, v});
      }
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

DenseMatrix low_rank(Index rows, Index cols, Index rank, std::uint64_t seed) {
  Rng rng(seed);
  const DenseMatrix x = rng.gaussian(rows, rank);
  const DenseMatrix y = rng.gaussian(rank, cols);
  return matmul(x, y);
}

DenseMatrix low_rank_plus_noise(Index rows, Index cols, Index rank, double noise, std::uint64_t seed) {
  DenseMatrix a = low_rank(rows, cols, rank, seed);
  Rng rng(derive_seed(seed, 1));
  for (double& v : a.data()) v += noise * rng.normal();
  return a;
}

DenseMatrix random_orthogonal(Index n, std::uint64_t seed) {
  Rng rng(seed);
  QrResult f = qr(rng.gaussian(n, n));
  // Sign fix makes the distribution Haar.
  for (Index j = 0; j < n; ++j) {
    if (f.r(j, j) < 0.0)
      for (Index i = 0; i < n; ++i) f.q(i, j) = -f.q(i, j);
  }
  return f.q;
}

DenseMatrix with_singular_values(Index rows, Index cols, std::span<const double> sigma,
                                 std::uint64_t seed) {
  if (sigma.size() > std::min(rows, cols))
    throw InvalidArgument("with_singular_values: too many singular values");
  const DenseMatrix u = random_orthogonal(rows, derive_seed(seed, 10)).leading_cols(sigma.size());
  const DenseMatrix v = random_orthogonal(cols, derive_seed(seed, 11)).leading_cols(sigma.size());
  DenseMatrix us = u;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < sigma.size(); ++j) us(i, j) *= sigma[j];
  return matmul_nt(us, v);
}

DenseMatrix ill_conditioned(Index n, double kappa, std::uint64_t seed) {
  std::vector<double> sigma(n, 1.0);
  for (Index i = 1; i < n; ++i)
    sigma[i] = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
  return with_singular_values(n, n, sigma, seed);
}

DenseMatrix diag_dominant(Index n, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      a(i, j) = rng.uniform(-1.0, 1.0);
      row_sum += std::abs(a(i, j));
    }
    a(i, i) = 1.0 + row_sum;
  }
  return a;
}

DenseMatrix spd(Index n, std::uint64_t seed) {
  Rng rng(seed);
  const DenseMatrix b = rng.gaussian(n, n);
  DenseMatrix a = matmul_tn(b, b);
  for (Index i = 0; i < n; ++i) {
    a(i, i) += 1e-6;
    for (Index j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  }
  return a;
}

}  // namespace pdq::gen
