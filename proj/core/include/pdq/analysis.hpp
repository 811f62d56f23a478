#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdq/matrix.hpp"
#include "pdq/regularization.hpp"
#include "pdq/solver.hpp"

namespace pdq::analysis {

/// Least-squares slope of log(y) against log(x). Needs at least two points,
/// all positive; throws InvalidArgument otherwise.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct PerturbationReport {
  std::vector<double> epsilons;
  std::vector<double> d_errors;               // mean over trials of |D - D0|_F
  std::vector<double> reconstruction_errors;  // mean over trials of |P D Q - A0|_F
  std::vector<std::vector<double>> trial_d_errors;  // [epsilon][trial]
  std::size_t trials = 0;
  double fitted_slope = 0.0;
  double beta_estimate = 0.0;  // max over the grid of d_error / epsilon
};

/// Draws seeded Gaussian E with |E|_F = epsilon (once per trial, reused across
/// the grid), solves A0 + E with `config`, and compares D against the solve
/// of A0. Requires svd init and orthonormalize. `jobs` > 1 runs trials on
/// worker threads; results do not depend on it.
PerturbationReport perturbation_experiment(const DenseMatrix& a0, std::span<const double> epsilons,
                                           const SolverConfig& config, const RegularizerSpec& spec,
                                           std::size_t trials, std::size_t jobs = 1);

struct PerturbationTrial {
  double d_error = 0.0;
  double reconstruction_error = 0.0;
};

/// One trial against a precomputed base factorization. epsilon may be zero.
PerturbationTrial perturbation_trial(const DenseMatrix& a0, const Factorization& base, double epsilon,
                                     std::uint64_t noise_seed, const SolverConfig& config,
                                     const RegularizerSpec& spec);

struct StabilityReport {
  double kappa_a = 0.0;
  double kappa_d = 0.0;
  double alpha_estimate = 0.0;  // kappa_d / kappa_a
  RegularizerSpec reg;
  SolverConfig config;
  double final_objective = 0.0;
  bool converged = false;
};

StabilityReport stability_experiment(const DenseMatrix& a, const SolverConfig& config,
                                     const RegularizerSpec& spec);

struct StabilityTable {
  std::vector<double> mus;
  std::vector<StabilityReport> rows;
};

/// stability_experiment repeated with spec.mu replaced by each entry of `mus`.
StabilityTable stability_sweep(const DenseMatrix& a, const SolverConfig& config,
                               const RegularizerSpec& spec, std::span<const double> mus,
                               std::size_t jobs = 1);

struct UniquenessReport {
  std::vector<std::uint64_t> seeds;
  std::vector<double> objectives;
  std::vector<double> distances;  // run i vs run 0 after alignment; distances[0] = 0
  double max_distance = 0.0;
  double max_objective_spread = 0.0;  // (max - min) / max(|min|, tiny)
  bool degenerate = false;            // repeated or vanishing leading singular values
};

/// Solves from each seed (random init), aligns every run to the first by
/// greedy matching on absolute correlation with sign fixing (P columns and Q
/// rows matched independently, D permuted to follow), and reports
/// sqrt(|dP|^2 + |dD|^2 + |dQ|^2) per run.
UniquenessReport uniqueness_experiment(const DenseMatrix& a, const SolverConfig& config,
                                       const RegularizerSpec& spec, std::span<const std::uint64_t> seeds,
                                       std::size_t jobs = 1);
/// Seeds are config.seed followed by derive_seed(config.seed, i) for i >= 1.
UniquenessReport uniqueness_experiment(const DenseMatrix& a, const SolverConfig& config,
                                       const RegularizerSpec& spec, std::size_t runs,
                                       std::size_t jobs = 1);

struct ScalingOptions {
  std::size_t repetitions = 5;
  std::size_t sweeps = 3;
  /// Use solve_rank_restricted with this r instead of solve.
  std::optional<Index> restricted_rank;
};

struct ScalingReport {
  std::vector<Index> sizes;
  Index k = 0;
  std::optional<double> density;
  std::vector<double> per_sweep_times;            // median over repetitions, seconds
  std::vector<std::uint64_t> per_sweep_flops;     // all buckets, mean sweep (exact integer division)
  std::vector<std::uint64_t> per_sweep_block_flops;
  std::vector<std::uint64_t> per_sweep_product_flops;
  std::vector<std::uint64_t> lu_flops;            // 2 n^3 / 3 for a dense LU of the same size
  std::vector<double> nominal_flop_ratio;         // (n^3 / 3) / (n^2 k) = n / (3k)
  std::vector<double> measured_flop_ratio;        // lu_flops / per_sweep_flops
  double time_slope = 0.0;
  double flop_slope = 0.0;
  double block_flop_slope = 0.0;
  std::size_t repetitions = 0;
  std::size_t sweeps = 0;
};

/// Seeded square Gaussian (dense) or Bernoulli-Gaussian (sparse) matrices of
/// each size, fixed sweep count from random init. Needs at least two strictly
/// increasing sizes.
ScalingReport scaling_experiment(std::span<const Index> sizes, Index k, std::optional<double> density,
                                 const SolverConfig& config, const ScalingOptions& options = {});

struct BaselineRow {
  std::string method;
  double residual = 0.0;          // Frobenius norm of the approximation error
  double residual_squared = 0.0;
  double seconds = 0.0;
};

struct BaselineTable {
  Index k = 0;
  std::vector<BaselineRow> rows;  // d-decomposition, truncated-svd, qr-rank-k, lu-full (square only)
  const BaselineRow* find(std::string_view method) const;
};

BaselineTable baseline_compare(const DenseMatrix& a, Index k, const SolverConfig& config,
                               const RegularizerSpec& spec);

/// Data points are the m columns of an n x m matrix.
struct ReduceResult {
  Factorization factorization;
  std::vector<double> mean;  // length n, the mean column
  double captured_energy = 0.0;
  double pca_captured_energy = 0.0;

  /// P^T (x - mean) for an n x j block of new points: returns k x j.
  DenseMatrix transform(const DenseMatrix& x) const;
};

ReduceResult reduce(const DenseMatrix& data, Index k, const SolverConfig& config,
                    const RegularizerSpec& spec);

}  // namespace pdq::analysis
