#pragma once

#include <string_view>

#include "pdq/matrix.hpp"

namespace pdq {

enum class RegKind { ridge, lasso, elastic, offdiag };

/// Which block of the three-factor product a penalty or prox applies to.
enum class Factor { P, D, Q };

/// Penalty on (P, D, Q) with weights lambda (P), mu (D), nu (Q).
///
/// ridge:   lambda |P|_F^2 + mu |D|_F^2 + nu |Q|_F^2
/// lasso:   entrywise l1 with the same weights
/// elastic: ridge + lasso, weights shared
/// offdiag: mu * sum_{i != j} D_ij^2; P and Q are not penalized
struct RegularizerSpec {
  RegKind kind = RegKind::ridge;
  double lambda = 0.0;
  double mu = 0.0;
  double nu = 0.0;

  /// Throws InvalidArgument when a weight is negative or non-finite.
  void validate() const;
  double weight(Factor which) const noexcept;
  /// True when every weight is zero (pure least squares).
  bool is_zero() const noexcept;
  /// True when the penalty is differentiable everywhere.
  bool is_smooth() const noexcept { return kind == RegKind::ridge || kind == RegKind::offdiag; }

  friend bool operator==(const RegularizerSpec&, const RegularizerSpec&) = default;
};

std::string_view to_string(RegKind kind) noexcept;
/// Accepts "ridge", "lasso", "elastic", "offdiag" (or "off-diagonal-penalty").
RegKind parse_reg_kind(std::string_view name);

/// Penalty contribution of the factor `which` alone.
double penalty_value(const RegularizerSpec& spec, const DenseMatrix& x, Factor which);
double penalty_value(const RegularizerSpec& spec, const DenseMatrix& p, const DenseMatrix& d,
                     const DenseMatrix& q);

/// argmin_z 1/2 |z - x|_F^2 + step * penalty(z) for the block `which`.
DenseMatrix prox_step(const RegularizerSpec& spec, const DenseMatrix& x, double step,
                      Factor which);

/// Zeroes entries with |x_ij| <= threshold. Post-pass for literal sparsity counts.
DenseMatrix hard_threshold(const DenseMatrix& x, double threshold);

}  // namespace pdq
