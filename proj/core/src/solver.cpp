#include "pdq/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "pdq/errors.hpp"
#include "pdq/linalg.hpp"
#include "pdq/random.hpp"

namespace pdq {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kProxIterations = 8;
// Relative pivot / eigenvalue size below which an unregularized Gram matrix is
// treated as singular.
constexpr double kSingularGram = 1e-13;
// Sparse inputs with a dimension above this are never densified; svd init
// falls back to randomized subspace iteration.
constexpr Index kDenseInitLimit = 2000;
constexpr Index kSubspaceOversample = 10;
constexpr int kSubspaceIterations = 4;

std::uint64_t gemm(Index a, Index b, Index c) noexcept {
  return 2ULL * static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b) *
         static_cast<std::uint64_t>(c);
}

// Mirrors the loop structure of qr(): reflector construction and application
// for R, then back-accumulation of the thin Q.
std::uint64_t qr_flops(Index m, Index n) noexcept {
  std::uint64_t f = 0;
  for (Index j = 0; j < n; ++j) {
    const std::uint64_t len = m - j;
    f += 4 * len + 4 * len * (n - j);
  }
  for (Index j = 0; j < n; ++j) f += 4ULL * (m - j) * (n - j);
  return f;
}

std::uint64_t jacobi_flops(Index m, Index n, std::size_t sweeps, std::uint64_t rotations) noexcept {
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  return sweeps * (pairs + n) * 2ULL * m + rotations * (6ULL * (m + n) + 4);
}

std::uint64_t product_flops(const DenseMatrix& a, Index k) noexcept { return gemm(a.rows(), a.cols(), k); }
std::uint64_t product_flops(const SparseMatrix& a, Index k) noexcept { return 2ULL * a.nnz() * k; }

bool finite_entries(const DenseMatrix& a) { return a.all_finite(); }
bool finite_entries(const SparseMatrix& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix densify(const DenseMatrix& a) { return a; }
DenseMatrix densify(const SparseMatrix& a) { return a.to_dense(); }

inline double dot(const double* x, const double* y, Index n) noexcept {
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

// |A - PDQ|_F^2, direct row-by-row evaluation without forming PDQ.
double data_fit(const DenseMatrix& a, const DenseMatrix& p, const DenseMatrix& d,
                const DenseMatrix& q, FlopCounts* fc) {
  const DenseMatrix pd = matmul(p, d);
  const DenseMatrix qt = q.transpose();
  const Index k = d.rows();
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    const double* r = pd.row(i).data();
    for (Index j = 0; j < a.cols(); ++j) {
      const double e = a(i, j) - dot(r, qt.row(j).data(), k);
      s += e * e;
    }
  }
  if (fc) fc->norm += gemm(p.rows(), k, k) + gemm(a.rows(), a.cols(), k) + 3ULL * a.size();
  return s;
}

// |A|^2 - 2 <A, PDQ> + |PDQ|^2 with |PDQ|^2 = <(PD)^T (PD), Q Q^T>.
double data_fit(const SparseMatrix& a, const DenseMatrix& p, const DenseMatrix& d,
                const DenseMatrix& q, FlopCounts* fc) {
  const DenseMatrix pd = matmul(p, d);
  const DenseMatrix qt = q.transpose();
  const Index k = d.rows();
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  double cross = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    const double* r = pd.row(i).data();
    for (Index t = offsets[i]; t < offsets[i + 1]; ++t) cross += vals[t] * dot(r, qt.row(cols[t]).data(), k);
  }
  const DenseMatrix g1 = matmul_tn(pd, pd);
  const DenseMatrix g2 = matmul_nt(q, q);
  const double value = frobenius_norm_squared(a) - 2.0 * cross + frobenius_inner(g1, g2);
  if (fc) {
    fc->norm += gemm(p.rows(), k, k) + 2ULL * a.nnz() * (k + 1) + gemm(k, p.rows(), k) +
                gemm(k, q.cols(), k) + 2ULL * (a.nnz() + k * k);
  }
  return std::max(value, 0.0);
}

template <class Data>
void check_shapes(const Data& a, const DenseMatrix& p, const DenseMatrix& d, const DenseMatrix& q) {
  const Index k = d.rows();
  if (d.cols() != k || p.rows() != a.rows() || p.cols() != k || q.rows() != k || q.cols() != a.cols()) {
    throw InvalidArgument("evaluate_objective: factors " + std::to_string(p.rows()) + "x" +
                          std::to_string(p.cols()) + ", " + std::to_string(d.rows()) + "x" +
                          std::to_string(d.cols()) + ", " + std::to_string(q.rows()) + "x" +
                          std::to_string(q.cols()) + " do not conform to " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

double largest_eigenvalue(const DenseMatrix& sym, FlopCounts& fc) {
  const SymmetricEigen e = symmetric_eigen(sym);
  fc.small += e.rotations * 8ULL * sym.rows();
  return e.values.empty() ? 0.0 : std::max(e.values.front(), 0.0);
}

PolarResult polar_counted(const DenseMatrix& g, FlopCounts& fc) {
  PolarResult r = polar_factor(g);
  const Index k = g.cols();
  fc.block += qr_flops(g.rows(), k) + gemm(g.rows(), k, k);
  fc.small += jacobi_flops(k, k, r.small_sweeps, r.small_rotations) + gemm(k, k, k);
  return r;
}

// argmax over orthonormal X of <X, C M> for k x k M. With the thin QR C = Qc Rc
// the maximizer is Qc polar(Rc M), and X^T C = W^T Rc comes for free.
struct StiefelStep {
  DenseMatrix x;
  DenseMatrix xtc;
};

StiefelStep stiefel_maximizer(const DenseMatrix& c, const DenseMatrix& m, FlopCounts& fc) {
  const Index k = c.cols();
  const QrResult f = qr(c);
  fc.block += qr_flops(c.rows(), k);
  const DenseMatrix target = matmul(f.r, m);
  const PolarResult w = polar_factor(target);
  fc.small += gemm(k, k, k) + qr_flops(k, k) + jacobi_flops(k, k, w.small_sweeps, w.small_rotations) +
              2 * gemm(k, k, k);
  StiefelStep out;
  out.x = matmul(f.q, w.factor);
  fc.block += gemm(c.rows(), k, k);
  out.xtc = matmul_tn(w.factor, f.r);
  fc.small += gemm(k, k, k);
  return out;
}

DenseMatrix add_diagonal(DenseMatrix s, double w) {
  for (Index i = 0; i < s.rows(); ++i) s(i, i) += w;
  return s;
}

// X solving X S = G for symmetric S (returned as X, n x k); G given as n x k.
DenseMatrix right_solve(const DenseMatrix& s, const DenseMatrix& g, bool unregularized,
                        const char* block, std::size_t sweep, FlopCounts& fc) {
  const Index k = s.rows();
  LuResult f;
  try {
    f = lu(s);
  } catch (const SingularMatrix&) {
    throw NumericalFailure(std::string("singular Gram matrix in ") + block +
                               " block with zero regularization",
                           sweep);
  }
  fc.small += 2ULL * k * k * k / 3;
  if (unregularized) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Index i = 0; i < k; ++i) {
      lo = std::min(lo, std::abs(f.upper(i, i)));
      hi = std::max(hi, std::abs(f.upper(i, i)));
    }
    if (lo <= kSingularGram * hi)
      throw NumericalFailure(std::string("singular Gram matrix in ") + block +
                                 " block with zero regularization",
                             sweep);
  }
  const DenseMatrix xt = lu_solve(f, g.transpose());
  fc.block += gemm(k, g.rows(), k);
  return xt.transpose();
}

double noise_floor(double a_norm2, double f_prev) noexcept { return 256.0 * kEps * (a_norm2 + f_prev); }

using Clock = std::chrono::steady_clock;

// One alternating-minimization run from a single initialization.
template <class Data>
class Engine {
 public:
  Engine(const Data& a, const SolverConfig& cfg, const RegularizerSpec& spec)
      : a_(a), cfg_(cfg), spec_(spec), a_norm2_(frobenius_norm_squared(a)) {}

  Factorization run(std::uint64_t seed) {
    Factorization out;
    out.config = cfg_;
    out.reg = spec_;
    const Index n = a_.rows();
    const Index m = a_.cols();
    const Index k = cfg_.rank;

    if (a_norm2_ == 0.0) {
      out.p = cfg_.orthonormalize ? DenseMatrix::eye(n, k) : DenseMatrix(n, k);
      out.d = DenseMatrix(k, k);
      out.q = cfg_.orthonormalize ? DenseMatrix::eye(k, m) : DenseMatrix(k, m);
      out.objective_history = {0.0};
      out.converged = true;
      return out;
    }

    initialize(seed, out.init_flops);
    double f_prev = objective(&out.init_flops);
    out.objective_history.push_back(f_prev);

    for (std::size_t sweep = 1; sweep <= cfg_.max_sweeps; ++sweep) {
      const DenseMatrix p0 = p_, d0 = d_, q0 = q_;
      FlopCounts fc;
      const auto t0 = Clock::now();
      step(sweep, fc);
      const double f = objective(&fc);
      out.sweep_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      out.sweep_flops.push_back(fc);
      out.sweeps_used = sweep;

      const double delta = f_prev - f;
      if (!(delta >= 0.0)) {
        // Only rounding can raise the objective: every block update is a minimizer
        // or a majorization step. Roll back to the last accepted iterate.
        p_ = p0;
        d_ = d0;
        q_ = q0;
        out.stalled = true;
        if (cfg_.fixed_sweeps) continue;
        out.converged = std::isfinite(f) && -delta <= noise_floor(a_norm2_, f_prev);
        break;
      }
      out.objective_history.push_back(f);
      const bool small = delta <= cfg_.tol * std::max(f_prev, 1e-300) ||
                         delta <= noise_floor(a_norm2_, f_prev);
      f_prev = f;
      if (!cfg_.fixed_sweeps && small) {
        out.converged = true;
        break;
      }
    }
    out.p = std::move(p_);
    out.d = std::move(d_);
    out.q = std::move(q_);
    return out;
  }

 private:
  double objective(FlopCounts* fc) const {
    const double fit = data_fit(a_, p_, d_, q_, fc);
    const double pen = penalty_value(spec_, p_, d_, q_);
    if (fc) fc->norm += 3ULL * (p_.size() + d_.size() + q_.size());
    return fit + pen;
  }

  void initialize(std::uint64_t seed, FlopCounts& fc) {
    const Index n = a_.rows();
    const Index m = a_.cols();
    const Index k = cfg_.rank;
    if (cfg_.init == InitKind::svd) {
      if constexpr (std::is_same_v<Data, SparseMatrix>) {
        if (std::max(n, m) > kDenseInitLimit) {
          subspace_init(seed, fc);
          return;
        }
      }
      const SvdResult s = svd(densify(a_));
      fc.product += jacobi_flops(std::max(n, m), std::min(n, m), s.sweeps, s.rotations);
      p_ = s.u.leading_cols(k);
      d_ = DenseMatrix::diagonal(std::span<const double>(s.singular_values.data(), k));
      q_ = s.vt.leading_rows(k);
      return;
    }
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    p_ = rng.gaussian(n, k, scale);
    d_ = rng.gaussian(k, k, scale);
    q_ = rng.gaussian(k, m, scale);
    if (cfg_.orthonormalize) {
      const QrResult fp = qr(p_);
      const QrResult fq = qr(q_.transpose());
      fc.block += qr_flops(n, k) + qr_flops(m, k);
      p_ = fp.q;
      q_ = fq.q.transpose();
      d_ = matmul(fp.r, matmul_nt(d_, fq.r));
      fc.small += 2 * gemm(k, k, k);
    }
  }

  // Leading singular triplets from block power iteration with products by A and
  // A^T only, then Rayleigh-Ritz on the captured subspace.
  void subspace_init(std::uint64_t seed, FlopCounts& fc) {
    const Index n = a_.rows();
    const Index m = a_.cols();
    const Index k = cfg_.rank;
    const Index l = std::min(k + kSubspaceOversample, std::min(n, m));
    Rng rng(seed);
    DenseMatrix y = qr(matmul(a_, rng.gaussian(m, l))).q;
    fc.product += product_flops(a_, l);
    fc.block += qr_flops(n, l);
    for (int it = 0; it < kSubspaceIterations; ++it) {
      const DenseMatrix z = qr(matmul_tn(a_, y)).q;
      y = qr(matmul(a_, z)).q;
      fc.product += 2 * product_flops(a_, l);
      fc.block += qr_flops(m, l) + qr_flops(n, l);
    }
    // A^T Y = U S V^T, so Y^T A = V S U^T and A ~ (Y V) S U^T.
    const DenseMatrix bt = matmul_tn(a_, y);
    fc.product += product_flops(a_, l);
    const SvdResult s = svd(bt);
    fc.block += jacobi_flops(m, l, s.sweeps, s.rotations);
    p_ = matmul(y, s.vt.transpose().leading_cols(k));
    fc.block += gemm(n, l, k);
    d_ = DenseMatrix::diagonal(std::span<const double>(s.singular_values.data(), k));
    q_ = s.u.leading_cols(k).transpose();
  }

  bool prox_block(Factor which) const noexcept {
    return !(spec_.kind == RegKind::ridge || spec_.weight(which) == 0.0);
  }

  void step(std::size_t sweep, FlopCounts& fc) {
    if (cfg_.orthonormalize) {
      step_orthonormal(fc);
    } else {
      step_free(sweep, fc);
    }
  }

  // P and Q on the Stiefel manifold.
  void step_orthonormal(FlopCounts& fc) {
    const Index k = cfg_.rank;

    // P: maximize <P, C D^T> with C = A Q^T.
    const DenseMatrix c = matmul_nt(a_, q_);
    fc.product += product_flops(a_, k);
    StiefelStep sp = stiefel_maximizer(c, d_.transpose(), fc);
    DenseMatrix b;
    if (prox_block(Factor::P)) {
      const DenseMatrix g = matmul_nt(c, d_);
      fc.block += gemm(c.rows(), k, k);
      if (accept_stiefel(p_, std::move(sp.x), g, Factor::P, false, fc)) {
        b = std::move(sp.xtc);
      } else {
        b = matmul_tn(p_, c);
        fc.block += gemm(k, c.rows(), k);
      }
    } else {
      p_ = std::move(sp.x);
      b = std::move(sp.xtc);
    }

    // D: with orthonormal P and Q the data term is |D - P^T A Q^T|^2 + const.
    d_ = prox_step(spec_, b, 0.5, Factor::D);
    fc.small += 3ULL * k * k;

    // Q^T: maximize <Q^T, E D> with E = A^T P.
    const DenseMatrix e = matmul_tn(a_, p_);
    fc.product += product_flops(a_, k);
    StiefelStep sq = stiefel_maximizer(e, d_, fc);
    if (prox_block(Factor::Q)) {
      const DenseMatrix h = matmul(e, d_);
      fc.block += gemm(e.rows(), k, k);
      DenseMatrix qt = q_.transpose();
      accept_stiefel(qt, std::move(sq.x), h, Factor::Q, true, fc);
      q_ = qt.transpose();
    } else {
      q_ = sq.x.transpose();
    }
  }

  // Takes the Procrustes candidate unless an l1 term on this block makes it worse
  // than the current iterate. The block objective is -2<X, G> + penalty(X).
  bool accept_stiefel(DenseMatrix& current, DenseMatrix candidate, const DenseMatrix& g,
                      Factor which, bool transposed, FlopCounts& fc) const {
    if (!prox_block(which)) {
      current = std::move(candidate);
      return true;
    }
    auto block_value = [&](const DenseMatrix& x) {
      const double pen = transposed ? penalty_value(spec_, x.transpose(), which)
                                    : penalty_value(spec_, x, which);
      return -2.0 * frobenius_inner(x, g) + pen;
    };
    fc.block += 8ULL * g.size();
    if (block_value(candidate) > block_value(current)) return false;
    current = std::move(candidate);
    return true;
  }

  // Unconstrained three-block minimization.
  void step_free(std::size_t sweep, FlopCounts& fc) {
    const Index n = a_.rows();
    const Index m = a_.cols();
    const Index k = cfg_.rank;

    // P: min |A - P M|^2 + pen(P), M = D Q. Normal equations P (M M^T + w I) = A M^T.
    const DenseMatrix c = matmul_nt(a_, q_);
    fc.product += product_flops(a_, k);
    const DenseMatrix g = matmul_nt(c, d_);
    fc.block += gemm(n, k, k);
    const DenseMatrix gq = matmul_nt(q_, q_);
    fc.block += gemm(k, m, k);
    const DenseMatrix s = matmul_nt(matmul(d_, gq), d_);
    fc.small += 2 * gemm(k, k, k);
    p_ = solve_factor_block(p_, s, g, Factor::P, sweep, fc);

    // D: min |A - P D Q|^2 + pen(D); normal equations Gp D Gq + w D = P^T A Q^T.
    const DenseMatrix b = matmul_tn(p_, c);
    fc.block += gemm(k, n, k);
    const DenseMatrix gp = matmul_tn(p_, p_);
    fc.block += gemm(k, n, k);
    d_ = solve_core_block(gp, gq, b, sweep, fc);

    // Q: min |A - N Q|^2 + pen(Q), N = P D. With W = Q^T: W (N^T N + w I) = A^T N.
    const DenseMatrix nmat = matmul(p_, d_);
    fc.block += gemm(n, k, k);
    const DenseMatrix h = matmul_tn(a_, nmat);
    fc.product += product_flops(a_, k);
    const DenseMatrix gn = matmul_tn(nmat, nmat);
    fc.block += gemm(k, n, k);
    q_ = solve_factor_block(q_.transpose(), gn, h, Factor::Q, sweep, fc).transpose();
  }

  // min_X |A' - X M|^2 + pen(X) given S = M M^T and G = A' M^T (X is rows x k).
  DenseMatrix solve_factor_block(const DenseMatrix& x, const DenseMatrix& s, const DenseMatrix& g,
                                 Factor which, std::size_t sweep, FlopCounts& fc) const {
    const double w = spec_.weight(which);
    const bool transposed = which == Factor::Q;
    const char* name = which == Factor::P ? "P" : "Q";
    if (!prox_block(which)) return right_solve(add_diagonal(s, w), g, w == 0.0, name, sweep, fc);

    // Proximal gradient on the smooth data term; gradient 2 (X S - G), Lipschitz 2 lambda_max(S).
    const double lip = 2.0 * largest_eigenvalue(s, fc) * (1.0 + 1e-12);
    const double t = lip > 0.0 ? 1.0 / lip : 1.0;
    DenseMatrix cur = x;
    for (int it = 0; it < kProxIterations; ++it) {
      DenseMatrix grad = matmul(cur, s);
      grad -= g;
      grad *= 2.0;
      fc.block += gemm(x.rows(), s.rows(), s.cols()) + 3ULL * x.size();
      DenseMatrix y = cur;
      grad *= t;
      y -= grad;
      cur = transposed ? prox_step(spec_, y.transpose(), t, which).transpose()
                       : prox_step(spec_, y, t, which);
      fc.block += 3ULL * x.size();
    }
    return cur;
  }

  DenseMatrix solve_core_block(const DenseMatrix& gp, const DenseMatrix& gq, const DenseMatrix& b,
                               std::size_t sweep, FlopCounts& fc) const {
    const Index k = b.rows();
    const double w = spec_.weight(Factor::D);
    if (!prox_block(Factor::D)) {
      const SymmetricEigen ep = symmetric_eigen(gp);
      const SymmetricEigen eq = symmetric_eigen(gq);
      fc.small += (ep.rotations + eq.rotations) * 8ULL * k;
      DenseMatrix bt = matmul(matmul_tn(ep.vectors, b), eq.vectors);
      fc.small += 2 * gemm(k, k, k);
      double scale = 0.0;
      for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) scale = std::max(scale, ep.values[i] * eq.values[j]);
      for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
          const double denom = ep.values[i] * eq.values[j] + w;
          if (w == 0.0 && !(denom > kSingularGram * scale))
            throw NumericalFailure("singular Gram matrix in D block with zero regularization", sweep);
          bt(i, j) /= denom;
        }
      }
      fc.small += 3ULL * k * k + 2 * gemm(k, k, k);
      return matmul_nt(matmul(ep.vectors, bt), eq.vectors);
    }
    // Gradient 2 (Gp D Gq - B), Lipschitz 2 lambda_max(Gp) lambda_max(Gq).
    const double lip = 2.0 * largest_eigenvalue(gp, fc) * largest_eigenvalue(gq, fc) * (1.0 + 1e-12);
    const double t = lip > 0.0 ? 1.0 / lip : 1.0;
    DenseMatrix cur = d_;
    for (int it = 0; it < kProxIterations; ++it) {
      DenseMatrix grad = matmul(matmul(gp, cur), gq);
      grad -= b;
      grad *= 2.0 * t;
      DenseMatrix y = cur;
      y -= grad;
      cur = prox_step(spec_, y, t, Factor::D);
      fc.small += 2 * gemm(k, k, k) + 6ULL * k * k;
    }
    return cur;
  }

  const Data& a_;
  SolverConfig cfg_;
  RegularizerSpec spec_;
  double a_norm2_;
  DenseMatrix p_, d_, q_;
};

// Symmetric variant: Q = P^T, P with orthonormal columns.
class SymmetricEngine {
 public:
  SymmetricEngine(const DenseMatrix& a, const SolverConfig& cfg, const RegularizerSpec& spec)
      : a_(a), cfg_(cfg), spec_(spec), a_norm2_(frobenius_norm_squared(a)) {
    // Gershgorin enclosure of the spectrum of A.
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    for (Index i = 0; i < a.rows(); ++i) {
      double r = 0.0;
      for (Index j = 0; j < a.cols(); ++j)
        if (j != i) r += std::abs(a(i, j));
      lo_ = std::min(lo_, a(i, i) - r);
      hi_ = std::max(hi_, a(i, i) + r);
    }
  }

  Factorization run(std::uint64_t seed) {
    Factorization out;
    out.config = cfg_;
    out.reg = spec_;
    const Index n = a_.rows();
    const Index k = cfg_.rank;
    if (a_norm2_ == 0.0) {
      out.p = DenseMatrix::eye(n, k);
      out.d = DenseMatrix(k, k);
      out.q = out.p.transpose();
      out.objective_history = {0.0};
      out.converged = true;
      return out;
    }

    FlopCounts& fi = out.init_flops;
    if (cfg_.init == InitKind::svd) {
      const SvdResult s = svd(a_);
      fi.product += jacobi_flops(n, n, s.sweeps, s.rotations);
      p_ = s.u.leading_cols(k);
    } else {
      Rng rng(seed);
      p_ = qr(rng.gaussian(n, k)).q;
      fi.block += qr_flops(n, k);
    }
    ap_ = matmul(a_, p_);
    fi.product += gemm(n, n, k);
    update_core(fi);
    double f_prev = objective(&fi);
    out.objective_history.push_back(f_prev);

    for (std::size_t sweep = 1; sweep <= cfg_.max_sweeps; ++sweep) {
      const DenseMatrix p0 = p_, d0 = d_, ap0 = ap_;
      FlopCounts fc;
      const auto t0 = Clock::now();
      update_basis(fc);
      update_core(fc);
      const double f = objective(&fc);
      out.sweep_seconds.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      out.sweep_flops.push_back(fc);
      out.sweeps_used = sweep;
      const double delta = f_prev - f;
      if (!(delta >= 0.0)) {
        p_ = p0;
        d_ = d0;
        ap_ = ap0;
        out.stalled = true;
        if (cfg_.fixed_sweeps) continue;
        out.converged = std::isfinite(f) && -delta <= noise_floor(a_norm2_, f_prev);
        break;
      }
      out.objective_history.push_back(f);
      const bool small = delta <= cfg_.tol * std::max(f_prev, 1e-300) ||
                         delta <= noise_floor(a_norm2_, f_prev);
      f_prev = f;
      if (!cfg_.fixed_sweeps && small) {
        out.converged = true;
        break;
      }
    }
    out.q = p_.transpose();
    out.p = std::move(p_);
    out.d = std::move(d_);
    return out;
  }

 private:
  double objective(FlopCounts* fc) const {
    const double fit = data_fit(a_, p_, d_, p_.transpose(), fc);
    return fit + penalty_value(spec_, p_, d_, p_.transpose());
  }

  void update_core(FlopCounts& fc) {
    const Index k = cfg_.rank;
    DenseMatrix b = matmul_tn(p_, ap_);
    fc.block += gemm(k, a_.rows(), k);
    for (Index i = 0; i < k; ++i)
      for (Index j = i + 1; j < k; ++j) b(i, j) = b(j, i) = 0.5 * (b(i, j) + b(j, i));
    if (spec_.kind == RegKind::offdiag) {
      d_ = DenseMatrix(k, k);
      for (Index i = 0; i < k; ++i) d_(i, i) = b(i, i);
    } else {
      d_ = prox_step(spec_, b, 0.5, Factor::D);
    }
    fc.small += 3ULL * k * k;
  }

  // Minorize-maximize step on tr(P^T A P D) + c |P|^2 (c |P|^2 is constant on
  // the Stiefel manifold); c makes the quadratic form D (x) A + c I convex.
  void update_basis(FlopCounts& fc) {
    const Index n = a_.rows();
    const Index k = cfg_.rank;
    const SymmetricEigen ed = symmetric_eigen(d_);
    fc.small += ed.rotations * 8ULL * k;
    const double dlo = ed.values.back();
    const double dhi = ed.values.front();
    const double min_prod = std::min({dlo * lo_, dlo * hi_, dhi * lo_, dhi * hi_});
    const double shift = std::max(0.0, -min_prod);

    DenseMatrix g = matmul(ap_, d_);
    fc.block += gemm(n, k, k);
    if (shift > 0.0) {
      DenseMatrix sp = p_;
      sp *= shift;
      g += sp;
      fc.block += 2ULL * p_.size();
    }
    DenseMatrix cand = polar_counted(g, fc).factor;
    DenseMatrix acand = matmul(a_, cand);
    fc.product += gemm(n, n, k);

    const bool l1 = !(spec_.kind == RegKind::ridge || spec_.kind == RegKind::offdiag) &&
                    (spec_.weight(Factor::P) > 0.0 || spec_.weight(Factor::Q) > 0.0);
    if (l1) {
      auto block_value = [&](const DenseMatrix& x, const DenseMatrix& ax) {
        const double h = frobenius_inner(x, matmul(ax, d_));
        return -2.0 * h + penalty_value(spec_, x, Factor::P) +
               penalty_value(spec_, x.transpose(), Factor::Q);
      };
      fc.block += 2 * gemm(n, k, k) + 8ULL * p_.size();
      if (!(block_value(cand, acand) <= block_value(p_, ap_))) return;
    }
    p_ = std::move(cand);
    ap_ = std::move(acand);
  }

  const DenseMatrix& a_;
  SolverConfig cfg_;
  RegularizerSpec spec_;
  double a_norm2_;
  double lo_ = 0.0, hi_ = 0.0;
  DenseMatrix p_, d_, ap_;
};

template <class Engine>
Factorization best_of_restarts(Engine& engine, const SolverConfig& cfg) {
  const std::size_t runs = cfg.init == InitKind::random ? std::max<std::size_t>(cfg.restarts, 1) : 1;
  Factorization best;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::uint64_t seed = r == 0 ? cfg.seed : derive_seed(cfg.seed, r);
    Factorization f = engine.run(seed);
    f.best_restart = r;
    // Strict comparison keeps the lowest restart index on ties.
    if (r == 0 || f.final_objective() < best.final_objective()) best = std::move(f);
  }
  return best;
}

template <class Data>
void validate_input(const Data& a, const SolverConfig& config, const RegularizerSpec& spec) {
  config.validate(a.rows(), a.cols());
  spec.validate();
  if (!finite_entries(a)) throw InvalidArgument("solve: input matrix has non-finite entries");
}

template <class Data>
Factorization solve_impl(const Data& a, const SolverConfig& config, const RegularizerSpec& spec) {
  validate_input(a, config, spec);
  Engine<Data> engine(a, config, spec);
  return best_of_restarts(engine, config);
}

double max_asymmetry(const DenseMatrix& a) {
  double worst = 0.0;
  double scale = 1.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      scale = std::max(scale, std::abs(a(i, j)));
      if (j > i) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    }
  }
  return worst / scale;
}

}  // namespace

std::string_view to_string(InitKind init) noexcept { return init == InitKind::svd ? "svd" : "random"; }

InitKind parse_init_kind(std::string_view name) {
  if (name == "svd") return InitKind::svd;
  if (name == "random") return InitKind::random;
  throw InvalidArgument("unknown init kind '" + std::string(name) + "'");
}

void SolverConfig::validate(Index rows, Index cols) const {
  if (rank < 1 || rank > std::min(rows, cols)) {
    throw InvalidArgument("rank k = " + std::to_string(rank) + " must satisfy 1 <= k <= min(" +
                          std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_sweeps < 1) throw InvalidArgument("max-sweeps must be at least 1");
  if (symmetric && rows != cols) throw InvalidArgument("symmetric solve requires a square matrix");
}

double evaluate_objective(const DenseMatrix& a, const DenseMatrix& p, const DenseMatrix& d,
                          const DenseMatrix& q, const RegularizerSpec& spec) {
  check_shapes(a, p, d, q);
  return data_fit(a, p, d, q, nullptr) + penalty_value(spec, p, d, q);
}

double evaluate_objective(const SparseMatrix& a, const DenseMatrix& p, const DenseMatrix& d,
                          const DenseMatrix& q, const RegularizerSpec& spec) {
  check_shapes(a, p, d, q);
  return data_fit(a, p, d, q, nullptr) + penalty_value(spec, p, d, q);
}

Factorization solve(const DenseMatrix& a, const SolverConfig& config, const RegularizerSpec& spec) {
  if (config.symmetric) return solve_symmetric(a, config, spec);
  return solve_impl(a, config, spec);
}

Factorization solve(const SparseMatrix& a, const SolverConfig& config, const RegularizerSpec& spec) {
  if (config.symmetric) return solve_symmetric(a.to_dense(), config, spec);
  return solve_impl(a, config, spec);
}

Factorization solve_symmetric(const DenseMatrix& a, const SolverConfig& config,
                              const RegularizerSpec& spec) {
  SolverConfig cfg = config;
  cfg.symmetric = true;
  validate_input(a, cfg, spec);
  if (max_asymmetry(a) > 1e-12) throw InvalidArgument("solve_symmetric: input is not symmetric");
  SymmetricEngine engine(a, cfg, spec);
  return best_of_restarts(engine, cfg);
}

Factorization solve_rank_restricted(const DenseMatrix& a, Index r, const SolverConfig& config,
                                    const RegularizerSpec& spec) {
  if (r < 1 || r > config.rank)
    throw InvalidArgument("rank-restricted solve requires 1 <= r <= k");
  SolverConfig cfg = config;
  cfg.rank = r;
  return solve(a, cfg, spec);
}

Factorization solve_rank_restricted(const SparseMatrix& a, Index r, const SolverConfig& config,
                                    const RegularizerSpec& spec) {
  if (r < 1 || r > config.rank)
    throw InvalidArgument("rank-restricted solve requires 1 <= r <= k");
  SolverConfig cfg = config;
  cfg.rank = r;
  return solve(a, cfg, spec);
}

DenseMatrix reconstruct(const Factorization& f) { return matmul(matmul(f.p, f.d), f.q); }

double residual_norm(const DenseMatrix& a, const Factorization& f) {
  return frobenius_norm(a - reconstruct(f));
}

}  // namespace pdq
