#include "pdq/regularization.hpp"

#include <cmath>
#include <string>

#include "pdq/errors.hpp"
#include "pdq/linalg.hpp"

namespace pdq {
namespace {

double soft(double v, double t) noexcept {
  const double a = std::abs(v) - t;
  return a > 0.0 ? std::copysign(a, v) : 0.0;
}

double offdiag_squares(const DenseMatrix& d) noexcept {
  double s = 0.0;
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j)
      if (i != j) s += d(i, j) * d(i, j);
  return s;
}

}  // namespace

void RegularizerSpec::validate() const {
  for (double w : {lambda, mu, nu}) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidArgument("regularization weights must be finite and non-negative");
  }
}

double RegularizerSpec::weight(Factor which) const noexcept {
  if (kind == RegKind::offdiag) return which == Factor::D ? mu : 0.0;
  switch (which) {
    case Factor::P: return lambda;
    case Factor::D: return mu;
    case Factor::Q: return nu;
  }
  return 0.0;
}

bool RegularizerSpec::is_zero() const noexcept {
  return weight(Factor::P) == 0.0 && weight(Factor::D) == 0.0 && weight(Factor::Q) == 0.0;
}

std::string_view to_string(RegKind kind) noexcept {
  switch (kind) {
    case RegKind::ridge: return "ridge";
    case RegKind::lasso: return "lasso";
    case RegKind::elastic: return "elastic";
    case RegKind::offdiag: return "offdiag";
  }
  return "ridge";
}

RegKind parse_reg_kind(std::string_view name) {
  if (name == "ridge") return RegKind::ridge;
  if (name == "lasso") return RegKind::lasso;
  if (name == "elastic") return RegKind::elastic;
  if (name == "offdiag" || name == "off-diagonal-penalty") return RegKind::offdiag;
  throw InvalidArgument("unknown regularizer kind '" + std::string(name) + "'");
}

double penalty_value(const RegularizerSpec& spec, const DenseMatrix& x, Factor which) {
  const double w = spec.weight(which);
  if (w == 0.0) return 0.0;
  switch (spec.kind) {
    case RegKind::ridge: return w * frobenius_norm_squared(x);
    case RegKind::lasso: return w * entrywise_l1(x);
    case RegKind::elastic: return w * (frobenius_norm_squared(x) + entrywise_l1(x));
    case RegKind::offdiag: return w * offdiag_squares(x);
  }
  return 0.0;
}

double penalty_value(const RegularizerSpec& spec, const DenseMatrix& p, const DenseMatrix& d,
                     const DenseMatrix& q) {
  return penalty_value(spec, p, Factor::P) + penalty_value(spec, d, Factor::D) +
         penalty_value(spec, q, Factor::Q);
}

DenseMatrix prox_step(const RegularizerSpec& spec, const DenseMatrix& x, double step,
                      Factor which) {
  if (!(step > 0.0)) throw InvalidArgument("prox_step: step must be positive");
  const double w = spec.weight(which);
  const double t = w * step;
  DenseMatrix z = x;
  if (t == 0.0) return z;
  switch (spec.kind) {
    case RegKind::ridge:
      z *= 1.0 / (1.0 + 2.0 * t);
      break;
    case RegKind::lasso:
      for (double& v : z.data()) v = soft(v, t);
      break;
    case RegKind::elastic:
      for (double& v : z.data()) v = soft(v, t) / (1.0 + 2.0 * t);
      break;
    case RegKind::offdiag:
      for (Index i = 0; i < z.rows(); ++i)
        for (Index j = 0; j < z.cols(); ++j)
          if (i != j) z(i, j) /= 1.0 + 2.0 * t;
      break;
  }
  return z;
}

DenseMatrix hard_threshold(const DenseMatrix& x, double threshold) {
  DenseMatrix z = x;
  for (double& v : z.data())
    if (std::abs(v) <= threshold) v = 0.0;
  return z;
}

}  // namespace pdq
