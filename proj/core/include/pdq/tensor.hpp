#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdq/matrix.hpp"
#include "pdq/solver.hpp"

namespace pdq {

inline constexpr std::size_t kMaxTensorOrder = 6;

/// d-way tensor, 1 <= d <= 6, stored with the last index varying fastest.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<Index> shape, double fill = 0.0);
  DenseTensor(std::vector<Index> shape, std::vector<double> data);

  std::size_t order() const noexcept { return shape_.size(); }
  std::span<const Index> shape() const noexcept { return shape_; }
  Index dim(std::size_t mode) const { return shape_.at(mode); }
  Index size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& at(std::span<const Index> index);
  double at(std::span<const Index> index) const;
  Index linear_index(std::span<const Index> index) const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  std::vector<Index> shape_;
  std::vector<double> data_;
};

double frobenius_norm(const DenseTensor& t) noexcept;

/// Mode-`mode` matricization (mode is 0-based): rows index that mode, columns
/// run over the remaining modes in cyclic order mode+1, ..., d-1, 0, ...,
/// mode-1 with the last of those varying fastest.
DenseMatrix unfold(const DenseTensor& t, std::size_t mode);
/// Inverse of unfold for the given full tensor shape.
DenseTensor fold(const DenseMatrix& m, std::size_t mode, std::span<const Index> shape);

/// t x_mode m: replaces dimension `mode` (size m.cols()) by m.rows().
DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode);

struct TuckerConfig {
  double tol = 1e-10;
  std::size_t max_sweeps = 100;
  std::uint64_t seed = 0;
  InitKind init = InitKind::svd;
};

struct TuckerFactorization {
  DenseTensor core;
  std::vector<DenseMatrix> factors;  // factor i is n_i x k_i, orthonormal columns
  std::vector<double> objective_history;
  std::size_t sweeps_used = 0;
  bool converged = false;
};

/// Higher-order orthogonal iteration for t ~ core x_1 P1 x_2 ... x_d Pd.
TuckerFactorization tucker_solve(const DenseTensor& t, std::span<const Index> ranks,
                                 const TuckerConfig& config = {});

DenseTensor tucker_reconstruct(const TuckerFactorization& f);

}  // namespace pdq
