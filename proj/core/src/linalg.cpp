#include "pdq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pdq/errors.hpp"

namespace pdq {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_inner(Index a_inner, Index b_inner, const char* op) {
  if (a_inner != b_inner) {
    throw InvalidArgument(std::string(op) + ": inner dimensions " + std::to_string(a_inner) +
                          " and " + std::to_string(b_inner) + " disagree");
  }
}

inline void axpy(double alpha, const double* x, double* y, Index n) noexcept {
  for (Index i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline double dot(const double* x, const double* y, Index n) noexcept {
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

// Column-major scratch used by the Jacobi and Householder kernels.
struct ColumnMajor {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> data;

  ColumnMajor(Index r, Index c) : rows(r), cols(c), data(r * c, 0.0) {}
  explicit ColumnMajor(const DenseMatrix& a) : ColumnMajor(a.rows(), a.cols()) {
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) data[j * rows + i] = a(i, j);
  }
  double* col(Index j) noexcept { return data.data() + j * rows; }
  const double* col(Index j) const noexcept { return data.data() + j * rows; }
};

// Gram-Schmidt a unit vector orthogonal to the given (orthonormal) columns.
void complete_column(ColumnMajor& u, Index target, const std::vector<bool>& filled) {
  const Index m = u.rows;
  std::vector<double> v(m);
  for (Index e = 0; e < m; ++e) {
    std::fill(v.begin(), v.end(), 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < u.cols; ++j) {
        if (!filled[j]) continue;
        const double proj = dot(u.col(j), v.data(), m);
        axpy(-proj, u.col(j), v.data(), m);
      }
    }
    const double norm = std::sqrt(dot(v.data(), v.data(), m));
    if (norm > 0.5) {
      for (Index i = 0; i < m; ++i) u.col(target)[i] = v[i] / norm;
      return;
    }
  }
  throw NumericalFailure("svd: could not complete orthonormal basis", target);
}

// Tall case (rows >= cols).
SvdResult jacobi_svd_tall(const DenseMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  ColumnMajor w(a);
  ColumnMajor v(n, n);
  for (Index j = 0; j < n; ++j) v.col(j)[j] = 1.0;

  const double tol = kEps * std::sqrt(static_cast<double>(std::max<Index>(m, 1)));
  SvdResult out;
  std::vector<double> norms(n);
  bool converged = n < 2;
  while (!converged) {
    if (out.sweeps == kMaxJacobiSweeps)
      throw NumericalFailure("svd: Jacobi sweeps did not converge", out.sweeps);
    ++out.sweeps;
    bool rotated = false;
    // Squared column norms, refreshed each sweep and updated through rotations.
    for (Index j = 0; j < n; ++j) norms[j] = dot(w.col(j), w.col(j), m);
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double* wp = w.col(p);
        double* wq = w.col(q);
        const double alpha = norms[p];
        const double beta = norms[q];
        const double gamma = dot(wp, wq, m);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        ++out.rotations;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Index i = 0; i < m; ++i) {
          const double xp = wp[i];
          const double xq = wq[i];
          wp[i] = c * xp - s * xq;
          wq[i] = s * xp + c * xq;
        }
        double* vp = v.col(p);
        double* vq = v.col(q);
        for (Index i = 0; i < n; ++i) {
          const double xp = vp[i];
          const double xq = vq[i];
          vp[i] = c * xp - s * xq;
          vq[i] = s * xp + c * xq;
        }
        norms[p] = alpha - t * gamma;
        norms[q] = beta + t * gamma;
        // The update cancels when a column is nearly emptied; recompute it then.
        if (norms[p] < 1e-4 * alpha) norms[p] = dot(wp, wp, m);
        if (norms[q] < 1e-4 * beta) norms[q] = dot(wq, wq, m);
      }
    }
    converged = !rotated;
  }

  std::vector<double> sigma(n);
  for (Index j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(w.col(j), w.col(j), m));
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return sigma[x] > sigma[y]; });

  ColumnMajor u(m, n);
  std::vector<bool> filled(n, false);
  out.singular_values.resize(n);
  for (Index jj = 0; jj < n; ++jj) {
    const Index j = order[jj];
    out.singular_values[jj] = sigma[j];
    if (sigma[j] >= 1e-300) {
      for (Index i = 0; i < m; ++i) u.col(jj)[i] = w.col(j)[i] / sigma[j];
      filled[jj] = true;
    }
  }
  for (Index jj = 0; jj < n; ++jj) {
    if (!filled[jj]) {
      complete_column(u, jj, filled);
      filled[jj] = true;
    }
  }

  out.u = DenseMatrix(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) out.u(i, j) = u.col(j)[i];
  out.vt = DenseMatrix(n, n);
  for (Index jj = 0; jj < n; ++jj)
    for (Index i = 0; i < n; ++i) out.vt(jj, i) = v.col(order[jj])[i];
  return out;
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_inner(a.cols(), b.rows(), "matmul");
  DenseMatrix c(a.rows(), b.cols());
  const Index k = b.cols();
  for (Index i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i).data();
    const double* ai = a.row(i).data();
    for (Index p = 0; p < a.cols(); ++p) {
      if (ai[p] != 0.0) axpy(ai[p], b.row(p).data(), ci, k);
    }
  }
  return c;
}

DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b) {
  check_inner(a.cols(), b.rows(), "matmul");
  DenseMatrix c(a.rows(), b.cols());
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i).data();
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p) axpy(vals[p], b.row(cols[p]).data(), ci, b.cols());
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_inner(a.rows(), b.rows(), "matmul_tn");
  DenseMatrix c(a.cols(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    const double* bi = b.row(i).data();
    for (Index p = 0; p < a.cols(); ++p) {
      if (ai[p] != 0.0) axpy(ai[p], bi, c.row(p).data(), b.cols());
    }
  }
  return c;
}

DenseMatrix matmul_tn(const SparseMatrix& a, const DenseMatrix& b) {
  check_inner(a.rows(), b.rows(), "matmul_tn");
  DenseMatrix c(a.cols(), b.cols());
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    const double* bi = b.row(i).data();
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p) axpy(vals[p], bi, c.row(cols[p]).data(), b.cols());
  }
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  check_inner(a.cols(), b.cols(), "matmul_nt");
  return matmul(a, b.transpose());
}

DenseMatrix matmul_nt(const SparseMatrix& a, const DenseMatrix& b) {
  check_inner(a.cols(), b.cols(), "matmul_nt");
  return matmul(a, b.transpose());
}

double frobenius_norm_squared(const DenseMatrix& a) noexcept {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

double frobenius_norm_squared(const SparseMatrix& a) noexcept {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double frobenius_norm(const DenseMatrix& a) noexcept { return std::sqrt(frobenius_norm_squared(a)); }
double frobenius_norm(const SparseMatrix& a) noexcept { return std::sqrt(frobenius_norm_squared(a)); }

double frobenius_inner(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("frobenius_inner: shape mismatch");
  return dot(a.data().data(), b.data().data(), a.size());
}

double entrywise_l1(const DenseMatrix& a) noexcept {
  double s = 0.0;
  for (double v : a.data()) s += std::abs(v);
  return s;
}

SvdResult svd(const DenseMatrix& a) {
  if (!a.all_finite()) throw InvalidArgument("svd: input has non-finite entries");
  if (a.rows() >= a.cols()) return jacobi_svd_tall(a);
  SvdResult t = jacobi_svd_tall(a.transpose());
  SvdResult out;
  out.u = t.vt.transpose();
  out.vt = t.u.transpose();
  out.singular_values = std::move(t.singular_values);
  out.sweeps = t.sweeps;
  out.rotations = t.rotations;
  return out;
}

double condition_number(const DenseMatrix& a) {
  const SvdResult s = svd(a);
  if (s.singular_values.empty()) return std::numeric_limits<double>::infinity();
  const double smin = s.singular_values.back();
  if (smin < 1e-300) return std::numeric_limits<double>::infinity();
  return s.singular_values.front() / smin;
}

QrResult qr(const DenseMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < n) throw InvalidArgument("qr: requires rows >= cols");
  ColumnMajor w(a);
  std::vector<std::vector<double>> reflectors(n);
  for (Index j = 0; j < n; ++j) {
    double* x = w.col(j) + j;
    const Index len = m - j;
    const double norm = std::sqrt(dot(x, x, len));
    std::vector<double> v(len, 0.0);
    if (norm > 0.0) {
      const double alpha = x[0] >= 0.0 ? -norm : norm;
      std::copy_n(x, len, v.begin());
      v[0] -= alpha;
      const double vnorm = std::sqrt(dot(v.data(), v.data(), len));
      if (vnorm > 0.0) {
        for (double& e : v) e /= vnorm;
        for (Index c = j; c < n; ++c) {
          double* y = w.col(c) + j;
          const double proj = 2.0 * dot(v.data(), y, len);
          axpy(-proj, v.data(), y, len);
        }
      } else {
        std::fill(v.begin(), v.end(), 0.0);
      }
      x[0] = alpha;
      for (Index i = 1; i < len; ++i) x[i] = 0.0;
    }
    reflectors[j] = std::move(v);
  }

  QrResult out;
  out.r = DenseMatrix(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) out.r(i, j) = w.col(j)[i];

  ColumnMajor q(m, n);
  for (Index j = 0; j < n; ++j) q.col(j)[j] = 1.0;
  for (Index jj = n; jj-- > 0;) {
    const auto& v = reflectors[jj];
    const Index len = m - jj;
    for (Index c = jj; c < n; ++c) {
      double* y = q.col(c) + jj;
      const double proj = 2.0 * dot(v.data(), y, len);
      if (proj != 0.0) axpy(-proj, v.data(), y, len);
    }
  }
  out.q = DenseMatrix(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) out.q(i, j) = q.col(j)[i];

  const double scale = frobenius_norm(a);
  const double rank_tol = 1e-13 * std::max(scale, 1e-300);
  for (Index j = 0; j < n; ++j)
    if (std::abs(out.r(j, j)) <= rank_tol) out.deficient_columns.push_back(j);
  return out;
}

DenseMatrix LuResult::permutation_matrix() const {
  const Index n = permutation.size();
  DenseMatrix p(n, n);
  for (Index i = 0; i < n; ++i) p(i, permutation[i]) = 1.0;
  return p;
}

LuResult lu(const DenseMatrix& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw InvalidArgument("lu: matrix must be square");
  DenseMatrix w = a;
  LuResult out;
  out.permutation.resize(n);
  std::iota(out.permutation.begin(), out.permutation.end(), Index{0});
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    double best = std::abs(w(k, k));
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(w(i, k)) > best) {
        best = std::abs(w(i, k));
        piv = i;
      }
    }
    if (best == 0.0) throw SingularMatrix(k);
    if (piv != k) {
      std::swap_ranges(w.row(k).begin(), w.row(k).end(), w.row(piv).begin());
      std::swap(out.permutation[k], out.permutation[piv]);
    }
    const double pivot = w(k, k);
    for (Index i = k + 1; i < n; ++i) {
      const double l = w(i, k) / pivot;
      w(i, k) = l;
      if (l != 0.0) {
        for (Index j = k + 1; j < n; ++j) w(i, j) -= l * w(k, j);
      }
    }
  }
  out.lower = DenseMatrix::identity(n);
  out.upper = DenseMatrix(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) out.lower(i, j) = w(i, j);
    for (Index j = i; j < n; ++j) out.upper(i, j) = w(i, j);
  }
  return out;
}

DenseMatrix lu_solve(const LuResult& f, const DenseMatrix& b) {
  const Index n = f.permutation.size();
  if (b.rows() != n) throw InvalidArgument("lu_solve: right-hand side has wrong row count");
  const Index k = b.cols();
  DenseMatrix x(n, k);
  for (Index i = 0; i < n; ++i) {
    const auto src = b.row(f.permutation[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) axpy(-f.lower(i, j), x.row(j).data(), x.row(i).data(), k);
  for (Index i = n; i-- > 0;) {
    for (Index j = i + 1; j < n; ++j) axpy(-f.upper(i, j), x.row(j).data(), x.row(i).data(), k);
    const double d = f.upper(i, i);
    for (double& v : x.row(i)) v /= d;
  }
  return x;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw InvalidArgument("symmetric_eigen: matrix must be square");
  DenseMatrix w(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) w(i, j) = w(j, i) = a(i, j);
  DenseMatrix v = DenseMatrix::identity(n);
  SymmetricEigen out;

  const double scale = frobenius_norm(w);
  for (std::size_t sweep = 0;; ++sweep) {
    double off = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
    if (std::sqrt(off) <= kEps * scale || scale == 0.0) break;
    if (sweep == kMaxJacobiSweeps)
      throw NumericalFailure("symmetric_eigen: Jacobi sweeps did not converge", sweep);
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        ++out.rotations;
        for (Index k = 0; k < n; ++k) {
          const double wkp = w(k, p);
          const double wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (Index k = 0; k < n; ++k) {
          const double wpk = w(p, k);
          const double wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        w(p, q) = w(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return w(x, x) > w(y, y); });
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (Index jj = 0; jj < n; ++jj) {
    out.values[jj] = w(order[jj], order[jj]);
    for (Index i = 0; i < n; ++i) out.vectors(i, jj) = v(i, order[jj]);
  }
  return out;
}

PolarResult polar_factor(const DenseMatrix& a) {
  if (a.rows() < a.cols()) throw InvalidArgument("polar_factor: requires rows >= cols");
  const QrResult f = qr(a);
  const SvdResult s = svd(f.r);
  PolarResult out;
  out.factor = matmul(f.q, matmul(s.u, s.vt));
  out.small_sweeps = s.sweeps;
  out.small_rotations = s.rotations;
  return out;
}

double orthonormality_error(const DenseMatrix& a) {
  const DenseMatrix g = matmul_tn(a, a);
  double worst = 0.0;
  for (Index i = 0; i < g.rows(); ++i)
    for (Index j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace pdq
