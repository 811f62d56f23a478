#include "pdq/tensor.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "pdq/errors.hpp"
#include "pdq/linalg.hpp"
#include "pdq/random.hpp"

namespace pdq {
namespace {

Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

void check_shape(std::span<const Index> shape) {
  if (shape.empty() || shape.size() > kMaxTensorOrder)
    throw InvalidArgument("tensor order must be between 1 and " + std::to_string(kMaxTensorOrder));
  for (Index n : shape)
    if (n == 0) throw InvalidArgument("tensor dimensions must be positive");
}

void check_mode(std::size_t mode, std::size_t order) {
  if (mode >= order)
    throw InvalidArgument("mode " + std::to_string(mode) + " out of range for order " +
                          std::to_string(order));
}

std::vector<Index> strides_of(std::span<const Index> shape) {
  std::vector<Index> s(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
  return s;
}

// Cyclic order of the modes other than `mode`.
std::vector<std::size_t> column_modes(std::size_t mode, std::size_t order) {
  std::vector<std::size_t> modes;
  for (std::size_t step = 1; step < order; ++step) modes.push_back((mode + step) % order);
  return modes;
}

// Walks every entry, handing the linear storage offset together with the
// (row, column) coordinates of the mode-`mode` unfolding.
template <class F>
void for_each_unfolded(std::span<const Index> shape, std::size_t mode, F&& f) {
  const std::size_t d = shape.size();
  const auto strides = strides_of(shape);
  const auto modes = column_modes(mode, d);
  std::vector<Index> col_stride(modes.size(), 1);
  for (std::size_t i = modes.size(); i-- > 1;) col_stride[i - 1] = col_stride[i] * shape[modes[i]];

  std::vector<Index> idx(d, 0);
  const Index total = product(shape);
  for (Index lin = 0; lin < total; ++lin) {
    Index col = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) col += idx[modes[i]] * col_stride[i];
    f(lin, idx[mode], col);
    for (std::size_t ax = d; ax-- > 0;) {
      if (++idx[ax] < shape[ax]) break;
      idx[ax] = 0;
    }
  }
  (void)strides;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(product(shape_), fill);
}

DenseTensor::DenseTensor(std::vector<Index> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != product(shape_))
    throw InvalidArgument("tensor data length does not match the product of its shape");
}

Index DenseTensor::linear_index(std::span<const Index> index) const {
  if (index.size() != shape_.size()) throw InvalidArgument("tensor index has wrong order");
  Index lin = 0;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (index[i] >= shape_[i]) throw InvalidArgument("tensor index out of range");
    lin = lin * shape_[i] + index[i];
  }
  return lin;
}

double& DenseTensor::at(std::span<const Index> index) { return data_[linear_index(index)]; }
double DenseTensor::at(std::span<const Index> index) const { return data_[linear_index(index)]; }

double frobenius_norm(const DenseTensor& t) noexcept {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return std::sqrt(s);
}

DenseMatrix unfold(const DenseTensor& t, std::size_t mode) {
  check_mode(mode, t.order());
  const Index rows = t.dim(mode);
  DenseMatrix m(rows, t.size() / rows);
  const auto data = t.data();
  for_each_unfolded(t.shape(), mode, [&](Index lin, Index r, Index c) { m(r, c) = data[lin]; });
  return m;
}

DenseTensor fold(const DenseMatrix& m, std::size_t mode, std::span<const Index> shape) {
  check_shape(shape);
  check_mode(mode, shape.size());
  const Index total = product(shape);
  if (m.rows() != shape[mode] || m.rows() * m.cols() != total)
    throw InvalidArgument("fold: matrix shape does not match tensor shape");
  DenseTensor t(std::vector<Index>(shape.begin(), shape.end()));
  auto data = t.data();
  for_each_unfolded(shape, mode, [&](Index lin, Index r, Index c) { data[lin] = m(r, c); });
  return t;
}

DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode) {
  check_mode(mode, t.order());
  if (m.cols() != t.dim(mode))
    throw InvalidArgument("mode_product: matrix has " + std::to_string(m.cols()) +
                          " columns but mode " + std::to_string(mode) + " has size " +
                          std::to_string(t.dim(mode)));
  std::vector<Index> shape(t.shape().begin(), t.shape().end());
  shape[mode] = m.rows();
  return fold(matmul(m, unfold(t, mode)), mode, shape);
}

DenseTensor tucker_reconstruct(const TuckerFactorization& f) {
  DenseTensor t = f.core;
  for (std::size_t i = 0; i < f.factors.size(); ++i) t = mode_product(t, f.factors[i], i);
  return t;
}

TuckerFactorization tucker_solve(const DenseTensor& t, std::span<const Index> ranks,
                                 const TuckerConfig& config) {
  const std::size_t d = t.order();
  if (ranks.size() != d)
    throw InvalidArgument("tucker_solve: expected " + std::to_string(d) + " ranks, got " +
                          std::to_string(ranks.size()));
  for (std::size_t i = 0; i < d; ++i) {
    if (ranks[i] < 1 || ranks[i] > t.dim(i))
      throw InvalidArgument("tucker_solve: rank " + std::to_string(ranks[i]) + " for mode " +
                            std::to_string(i) + " must lie in [1, " + std::to_string(t.dim(i)) + "]");
  }
  if (!(config.tol > 0.0) || config.max_sweeps < 1)
    throw InvalidArgument("tucker_solve: tol must be positive and max-sweeps at least 1");
  for (double v : t.data())
    if (!std::isfinite(v)) throw InvalidArgument("tucker_solve: non-finite tensor entry");

  TuckerFactorization out;
  const double norm2 = std::pow(frobenius_norm(t), 2);
  if (norm2 == 0.0) {
    for (std::size_t i = 0; i < d; ++i) out.factors.push_back(DenseMatrix::eye(t.dim(i), ranks[i]));
    out.core = DenseTensor(std::vector<Index>(ranks.begin(), ranks.end()));
    out.objective_history = {0.0};
    out.converged = true;
    return out;
  }

  auto leading_left = [](const DenseMatrix& m, Index k) {
    if (m.cols() >= k) return svd(m).u.leading_cols(k);
    // Fewer columns than k: zero columns make svd complete the basis.
    DenseMatrix padded(m.rows(), k);
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) padded(i, j) = m(i, j);
    return svd(padded).u.leading_cols(k);
  };

  if (config.init == InitKind::svd) {
    for (std::size_t i = 0; i < d; ++i) out.factors.push_back(leading_left(unfold(t, i), ranks[i]));
  } else {
    Rng rng(config.seed);
    for (std::size_t i = 0; i < d; ++i) out.factors.push_back(qr(rng.gaussian(t.dim(i), ranks[i])).q);
  }

  auto project_all = [&](const std::vector<DenseMatrix>& factors) {
    DenseTensor y = t;
    for (std::size_t j = 0; j < d; ++j) y = mode_product(y, factors[j].transpose(), j);
    return y;
  };
  auto residual = [&](const DenseTensor& core, const std::vector<DenseMatrix>& factors) {
    DenseTensor r = core;
    for (std::size_t j = 0; j < d; ++j) r = mode_product(r, factors[j], j);
    double s = 0.0;
    const auto a = t.data();
    const auto b = r.data();
    for (Index i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
  };

  out.core = project_all(out.factors);
  double f_prev = residual(out.core, out.factors);
  out.objective_history.push_back(f_prev);
  const double floor = 256.0 * std::numeric_limits<double>::epsilon() * norm2;

  for (std::size_t sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    std::vector<DenseMatrix> next = out.factors;
    for (std::size_t i = 0; i < d; ++i) {
      DenseTensor y = t;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) y = mode_product(y, next[j].transpose(), j);
      next[i] = leading_left(unfold(y, i), ranks[i]);
    }
    DenseTensor core = project_all(next);
    const double f = residual(core, next);
    out.sweeps_used = sweep;
    const double delta = f_prev - f;
    if (!(delta >= 0.0)) {
      out.converged = -delta <= floor;
      break;
    }
    out.factors = std::move(next);
    out.core = std::move(core);
    out.objective_history.push_back(f);
    const bool small = delta <= config.tol * std::max(f_prev, 1e-300) || delta <= floor;
    f_prev = f;
    if (small) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace pdq
