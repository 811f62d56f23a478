#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pdq/matrix.hpp"
#include "pdq/regularization.hpp"

namespace pdq {

enum class InitKind { svd, random };

std::string_view to_string(InitKind init) noexcept;
InitKind parse_init_kind(std::string_view name);

struct SolverConfig {
  Index rank = 1;
  double tol = 1e-10;
  std::size_t max_sweeps = 500;
  std::uint64_t seed = 0;
  InitKind init = InitKind::svd;
  bool orthonormalize = true;
  bool symmetric = false;
  /// Number of random starts; the best final objective wins. Ignored for svd init.
  std::size_t restarts = 1;
  /// Run exactly max_sweeps sweeps with no convergence exit (timing runs).
  bool fixed_sweeps = false;

  void validate(Index rows, Index cols) const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Floating-point operation tallies. Multiply-add counts as two.
///  product: kernels that touch the input matrix A
///  block:   work on the thin n x k / k x m factors (Gram matrices, thin QR, ...)
///  small:   dense k x k kernels (LU, Jacobi SVD/eigen of k x k blocks)
///  norm:    objective evaluations
struct FlopCounts {
  std::uint64_t product = 0;
  std::uint64_t block = 0;
  std::uint64_t small = 0;
  std::uint64_t norm = 0;

  std::uint64_t total() const noexcept { return product + block + small + norm; }
  FlopCounts& operator+=(const FlopCounts& o) noexcept {
    product += o.product;
    block += o.block;
    small += o.small;
    norm += o.norm;
    return *this;
  }
  friend bool operator==(const FlopCounts&, const FlopCounts&) = default;
};

struct Factorization {
  DenseMatrix p;  // n x k
  DenseMatrix d;  // k x k
  DenseMatrix q;  // k x m
  /// Entry 0 is the objective at initialization, then one entry per accepted sweep.
  std::vector<double> objective_history;
  std::size_t sweeps_used = 0;
  bool converged = false;
  /// A sweep failed to decrease the objective and was rolled back.
  bool stalled = false;
  std::size_t best_restart = 0;
  SolverConfig config;
  RegularizerSpec reg;

  FlopCounts init_flops;
  std::vector<FlopCounts> sweep_flops;
  std::vector<double> sweep_seconds;

  Index rank() const noexcept { return d.rows(); }
  double final_objective() const { return objective_history.back(); }
};

/// |A - PDQ|_F^2 + penalty. Sparse A is never densified.
double evaluate_objective(const DenseMatrix& a, const DenseMatrix& p, const DenseMatrix& d,
                          const DenseMatrix& q, const RegularizerSpec& spec);
double evaluate_objective(const SparseMatrix& a, const DenseMatrix& p, const DenseMatrix& d,
                          const DenseMatrix& q, const RegularizerSpec& spec);

/// Alternating block minimization of |A - PDQ|_F^2 + R(P, D, Q).
///
/// With orthonormalize set, P has orthonormal columns and Q orthonormal rows
/// throughout and all scale lives in D: the P and Q blocks are orthogonal
/// Procrustes problems and the D block is a closed-form prox. Otherwise P, D
/// and Q are unconstrained and each smooth block is solved exactly from its
/// normal equations (k x k LU); l1 terms use proximal-gradient inner steps.
/// config.symmetric dispatches to solve_symmetric. For sparse A with a
/// dimension above 2000, svd init uses randomized subspace iteration instead
/// of a dense SVD.
Factorization solve(const DenseMatrix& a, const SolverConfig& config, const RegularizerSpec& spec);
Factorization solve(const SparseMatrix& a, const SolverConfig& config, const RegularizerSpec& spec);

/// A ~ P D P^T for symmetric A. P keeps orthonormal columns; Q is set to P^T.
/// With the offdiag kind, D is projected onto diagonal matrices.
Factorization solve_symmetric(const DenseMatrix& a, const SolverConfig& config,
                              const RegularizerSpec& spec);

/// solve() with every thin dimension sized r (r <= config.rank).
Factorization solve_rank_restricted(const DenseMatrix& a, Index r, const SolverConfig& config,
                                    const RegularizerSpec& spec);
Factorization solve_rank_restricted(const SparseMatrix& a, Index r, const SolverConfig& config,
                                    const RegularizerSpec& spec);

DenseMatrix reconstruct(const Factorization& f);
/// |A - PDQ|_F evaluated directly.
double residual_norm(const DenseMatrix& a, const Factorization& f);

}  // namespace pdq
