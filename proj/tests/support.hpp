#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "pdq/matrix.hpp"
#include "pdq/random.hpp"

namespace pdq::testing {

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(e.rows(), e.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

/// Singular values from Eigen's BDC SVD, descending.
inline Eigen::VectorXd oracle_singular_values(const DenseMatrix& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(m));
  return svd.singularValues();
}

/// Eckart-Young tail sum_{i >= k} sigma_i^2 from the oracle.
inline double oracle_tail(const DenseMatrix& m, Index k) {
  const Eigen::VectorXd s = oracle_singular_values(m);
  double t = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(k); i < s.size(); ++i) t += s(i) * s(i);
  return t;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0.0;
  for (Index i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

/// Small seeded case generator for property tests.
class Cases {
 public:
  explicit Cases(std::uint64_t seed) : engine_(seed) {}
  Index size(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::uint64_t seed() { return engine_(); }
  DenseMatrix matrix(Index r, Index c) { return Rng(seed()).gaussian(r, c); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pdq::testing
