#include "pdq/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "pdq/errors.hpp"
#include "pdq/generate.hpp"
#include "pdq/linalg.hpp"
#include "pdq/random.hpp"

namespace pdq::analysis {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs body(i) for i in [0, n). Exceptions are rethrown in index order.
template <class Body>
void parallel_for(std::size_t n, std::size_t jobs, Body&& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min(jobs, n);
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DenseMatrix unit_noise(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix e = rng.gaussian(rows, cols);
  e *= 1.0 / frobenius_norm(e);
  return e;
}

double sq(double x) { return x * x; }

}  // namespace

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("slope fit needs equally many x and y values");
  if (x.size() < 2) throw InvalidArgument("slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("slope fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit needs distinct x values");
  return sxy / sxx;
}

PerturbationTrial perturbation_trial(const DenseMatrix& a0, const Factorization& base, double epsilon,
                                     std::uint64_t noise_seed, const SolverConfig& config,
                                     const RegularizerSpec& spec) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
  DenseMatrix a = a0;
  if (epsilon > 0.0) {
    DenseMatrix e = unit_noise(a0.rows(), a0.cols(), noise_seed);
    e *= epsilon;
    a += e;
  }
  const Factorization f = solve(a, config, spec);
  PerturbationTrial t;
  t.d_error = frobenius_norm(f.d - base.d);
  t.reconstruction_error = frobenius_norm(reconstruct(f) - a0);
  return t;
}

PerturbationReport perturbation_experiment(const DenseMatrix& a0, std::span<const double> epsilons,
                                           const SolverConfig& config, const RegularizerSpec& spec,
                                           std::size_t trials, std::size_t jobs) {
  if (epsilons.empty()) throw InvalidArgument("epsilon grid is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw InvalidArgument("epsilons must be positive");
    if (i && !(epsilons[i] > epsilons[i - 1])) throw InvalidArgument("epsilons must be strictly increasing");
  }
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (config.init != InitKind::svd || !config.orthonormalize)
    throw InvalidArgument("perturbation experiment requires svd init with orthonormalized factors");

  const Factorization base = solve(a0, config, spec);
  const std::size_t ne = epsilons.size();
  std::vector<PerturbationTrial> cells(ne * trials);
  parallel_for(ne * trials, jobs, [&](std::size_t idx) {
    const std::size_t ie = idx / trials;
    const std::size_t t = idx % trials;
    cells[idx] = perturbation_trial(a0, base, epsilons[ie], derive_seed(config.seed, t + 1), config, spec);
  });

  PerturbationReport r;
  r.trials = trials;
  r.epsilons.assign(epsilons.begin(), epsilons.end());
  std::vector<double> fit_x, fit_y;
  for (std::size_t ie = 0; ie < ne; ++ie) {
    std::vector<double> per(trials);
    double de = 0.0, re = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& c = cells[ie * trials + t];
      per[t] = c.d_error;
      de += c.d_error;
      re += c.reconstruction_error;
    }
    de /= static_cast<double>(trials);
    re /= static_cast<double>(trials);
    r.d_errors.push_back(de);
    r.reconstruction_errors.push_back(re);
    r.trial_d_errors.push_back(std::move(per));
    r.beta_estimate = std::max(r.beta_estimate, de / epsilons[ie]);
    if (de > 0.0) {
      fit_x.push_back(epsilons[ie]);
      fit_y.push_back(de);
    }
  }
  r.fitted_slope = fit_x.size() >= 2 ? fit_loglog_slope(fit_x, fit_y) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

StabilityReport stability_experiment(const DenseMatrix& a, const SolverConfig& config,
                                     const RegularizerSpec& spec) {
  const Factorization f = solve(a, config, spec);
  StabilityReport r;
  r.kappa_a = condition_number(a);
  r.kappa_d = condition_number(f.d);
  r.alpha_estimate = r.kappa_d / r.kappa_a;
  r.reg = spec;
  r.config = config;
  r.final_objective = f.final_objective();
  r.converged = f.converged;
  return r;
}

StabilityTable stability_sweep(const DenseMatrix& a, const SolverConfig& config,
                               const RegularizerSpec& spec, std::span<const double> mus,
                               std::size_t jobs) {
  StabilityTable table;
  table.mus.assign(mus.begin(), mus.end());
  table.rows.resize(mus.size());
  parallel_for(mus.size(), jobs, [&](std::size_t i) {
    RegularizerSpec s = spec;
    s.mu = mus[i];
    table.rows[i] = stability_experiment(a, config, s);
  });
  return table;
}

namespace {

struct Matching {
  std::vector<Index> perm;   // ref vector a pairs with run vector perm[a]
  std::vector<double> sign;  // +-1 making the paired vectors positively correlated
};

// Greedy one-to-one pairing of k vectors by |cosine|; vec(f, a, i) is entry i
// of vector a of factorization f.
template <class Get>
Matching greedy_match(const Factorization& ref, const Factorization& run, Index k, Index len, Get vec) {
  std::vector<double> n_ref(k, 0.0), n_run(k, 0.0);
  for (Index a = 0; a < k; ++a)
    for (Index i = 0; i < len; ++i) {
      n_ref[a] += sq(vec(ref, a, i));
      n_run[a] += sq(vec(run, a, i));
    }
  struct Pair {
    double score;
    Index a, b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(k * k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) {
      double dot = 0.0;
      for (Index i = 0; i < len; ++i) dot += vec(ref, a, i) * vec(run, b, i);
      const double denom = std::sqrt(n_ref[a] * n_run[b]);
      pairs.push_back({denom > 0.0 ? std::abs(dot) / denom : 0.0, a, b});
    }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.score > y.score; });
  Matching m{std::vector<Index>(k, k), std::vector<double>(k, 1.0)};
  std::vector<bool> used(k, false);
  for (const auto& pr : pairs) {
    if (m.perm[pr.a] != k || used[pr.b]) continue;
    m.perm[pr.a] = pr.b;
    used[pr.b] = true;
  }
  for (Index a = 0; a < k; ++a) {
    double dot = 0.0;
    for (Index i = 0; i < len; ++i) dot += vec(ref, a, i) * vec(run, m.perm[a], i);
    m.sign[a] = dot < 0.0 ? -1.0 : 1.0;
  }
  return m;
}

// Aligns run to ref (P columns and Q rows matched independently, D permuted
// and signed to match) and returns sqrt(|dP|^2 + |dD|^2 + |dQ|^2).
double aligned_distance(const Factorization& ref, const Factorization& run) {
  const Index k = ref.rank();
  const Index n = ref.p.rows();
  const Index m = ref.q.cols();
  const Matching mp =
      greedy_match(ref, run, k, n, [](const Factorization& f, Index a, Index i) { return f.p(i, a); });
  const Matching mq =
      greedy_match(ref, run, k, m, [](const Factorization& f, Index a, Index j) { return f.q(a, j); });
  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index a = 0; a < k; ++a) total += sq(ref.p(i, a) - mp.sign[a] * run.p(i, mp.perm[a]));
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b)
      total += sq(ref.d(a, b) - mp.sign[a] * mq.sign[b] * run.d(mp.perm[a], mq.perm[b]));
  for (Index a = 0; a < k; ++a)
    for (Index j = 0; j < m; ++j) total += sq(ref.q(a, j) - mq.sign[a] * run.q(mq.perm[a], j));
  return std::sqrt(total);
}

bool spectrum_degenerate(const DenseMatrix& a, Index k) {
  const auto s = svd(a).singular_values;
  if (s.empty() || s[0] == 0.0) return true;
  const double scale = s[0];
  if (s[k - 1] <= 1e-10 * scale) return true;
  for (Index i = 0; i < k && i + 1 < s.size(); ++i)
    if (s[i] - s[i + 1] <= 1e-8 * scale) return true;
  return false;
}

}  // namespace

UniquenessReport uniqueness_experiment(const DenseMatrix& a, const SolverConfig& config,
                                       const RegularizerSpec& spec, std::span<const std::uint64_t> seeds,
                                       std::size_t jobs) {
  if (seeds.size() < 2) throw InvalidArgument("uniqueness experiment needs at least two runs");
  if (config.init != InitKind::random) throw InvalidArgument("uniqueness experiment requires random init");
  config.validate(a.rows(), a.cols());
  std::vector<Factorization> runs(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    SolverConfig c = config;
    c.seed = seeds[i];
    runs[i] = solve(a, c, spec);
  });
  UniquenessReport r;
  r.seeds.assign(seeds.begin(), seeds.end());
  for (const auto& f : runs) r.objectives.push_back(f.final_objective());
  for (const auto& f : runs) r.distances.push_back(aligned_distance(runs[0], f));
  r.max_distance = *std::max_element(r.distances.begin(), r.distances.end());
  const auto [lo, hi] = std::minmax_element(r.objectives.begin(), r.objectives.end());
  r.max_objective_spread = (*hi - *lo) / std::max(std::abs(*hi), std::numeric_limits<double>::min());
  r.degenerate = spectrum_degenerate(a, config.rank);
  return r;
}

UniquenessReport uniqueness_experiment(const DenseMatrix& a, const SolverConfig& config,
                                       const RegularizerSpec& spec, std::size_t runs, std::size_t jobs) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < runs; ++i) seeds.push_back(i == 0 ? config.seed : derive_seed(config.seed, i));
  return uniqueness_experiment(a, config, spec, seeds, jobs);
}

ScalingReport scaling_experiment(std::span<const Index> sizes, Index k, std::optional<double> density,
                                 const SolverConfig& config, const ScalingOptions& options) {
  if (sizes.size() < 2) throw InvalidArgument("scaling experiment needs at least two sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw InvalidArgument("sizes must be strictly increasing");
  if (k < 1 || k > sizes.front()) throw InvalidArgument("k must satisfy 1 <= k <= smallest size");
  if (density && !(*density > 0.0 && *density <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
  if (options.repetitions < 1 || options.sweeps < 1)
    throw InvalidArgument("repetitions and sweeps must be at least 1");
  if (options.restricted_rank && (*options.restricted_rank < 1 || *options.restricted_rank > k))
    throw InvalidArgument("restricted rank r must satisfy 1 <= r <= k");

  SolverConfig cfg = config;
  cfg.rank = k;
  cfg.init = InitKind::random;
  cfg.fixed_sweeps = true;
  cfg.max_sweeps = options.sweeps;
  cfg.restarts = 1;
  cfg.symmetric = false;
  const RegularizerSpec spec{};

  ScalingReport r;
  r.sizes.assign(sizes.begin(), sizes.end());
  r.k = k;
  r.density = density;
  r.repetitions = options.repetitions;
  r.sweeps = options.sweeps;
  for (const Index n : sizes) {
    const std::uint64_t mseed = derive_seed(config.seed, n);
    std::optional<DenseMatrix> dense;
    std::optional<SparseMatrix> sparse;
    if (density) {
      sparse = gen::sparse(n, n, *density, mseed);
    } else {
      Rng rng(mseed);
      dense = rng.gaussian(n, n);
    }
    std::vector<double> times;
    FlopCounts flops;
    std::size_t counted = 0;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
      Factorization f;
      if (options.restricted_rank) {
        f = dense ? solve_rank_restricted(*dense, *options.restricted_rank, cfg, spec)
                  : solve_rank_restricted(*sparse, *options.restricted_rank, cfg, spec);
      } else {
        f = dense ? solve(*dense, cfg, spec) : solve(*sparse, cfg, spec);
      }
      if (f.sweep_seconds.empty()) throw NumericalFailure("no sweeps recorded", 0);
      times.push_back(std::accumulate(f.sweep_seconds.begin(), f.sweep_seconds.end(), 0.0) /
                      static_cast<double>(f.sweep_seconds.size()));
      if (rep == 0) {
        for (const auto& s : f.sweep_flops) flops += s;
        counted = f.sweep_flops.size();
      }
    }
    const auto c = static_cast<std::uint64_t>(counted);
    r.per_sweep_times.push_back(median(times));
    r.per_sweep_flops.push_back(flops.total() / c);
    r.per_sweep_block_flops.push_back(flops.block / c);
    r.per_sweep_product_flops.push_back(flops.product / c);
    const auto nn = static_cast<std::uint64_t>(n);
    r.lu_flops.push_back(2 * nn * nn * nn / 3);
    const double nd = static_cast<double>(n);
    r.nominal_flop_ratio.push_back(nd / (3.0 * static_cast<double>(k)));
    r.measured_flop_ratio.push_back(static_cast<double>(r.lu_flops.back()) /
                                    static_cast<double>(r.per_sweep_flops.back()));
  }
  std::vector<double> x(sizes.begin(), sizes.end());
  auto as_double = [](const std::vector<std::uint64_t>& v) { return std::vector<double>(v.begin(), v.end()); };
  r.time_slope = fit_loglog_slope(x, r.per_sweep_times);
  r.flop_slope = fit_loglog_slope(x, as_double(r.per_sweep_flops));
  r.block_flop_slope = fit_loglog_slope(x, as_double(r.per_sweep_block_flops));
  return r;
}

const BaselineRow* BaselineTable::find(std::string_view method) const {
  for (const auto& row : rows)
    if (row.method == method) return &row;
  return nullptr;
}

BaselineTable baseline_compare(const DenseMatrix& a, Index k, const SolverConfig& config,
                               const RegularizerSpec& spec) {
  SolverConfig cfg = config;
  cfg.rank = k;
  cfg.validate(a.rows(), a.cols());
  BaselineTable table;
  table.k = k;

  {
    const auto t0 = Clock::now();
    const Factorization f = solve(a, cfg, spec);
    const double secs = seconds_since(t0);
    const double res = residual_norm(a, f);
    table.rows.push_back({"d-decomposition", res, res * res, secs});
  }
  {
    const auto t0 = Clock::now();
    const auto s = svd(a).singular_values;
    double tail = 0.0;
    for (std::size_t i = k; i < s.size(); ++i) tail += s[i] * s[i];
    table.rows.push_back({"truncated-svd", std::sqrt(tail), tail, seconds_since(t0)});
  }
  {
    const auto t0 = Clock::now();
    const bool wide = a.rows() < a.cols();
    const QrResult f = qr(wide ? a.transpose() : a);
    DenseMatrix approx = matmul(f.q.leading_cols(k), f.r.leading_rows(k));
    if (wide) approx = approx.transpose();
    const double secs = seconds_since(t0);
    const double res = frobenius_norm(a - approx);
    table.rows.push_back({"qr-rank-k", res, res * res, secs});
  }
  if (a.rows() == a.cols()) {
    const auto t0 = Clock::now();
    const LuResult f = lu(a);
    const DenseMatrix diff = matmul(f.permutation_matrix(), a) - matmul(f.lower, f.upper);
    const double secs = seconds_since(t0);
    const double res = frobenius_norm(diff);
    table.rows.push_back({"lu-full", res, res * res, secs});
  }
  return table;
}

DenseMatrix ReduceResult::transform(const DenseMatrix& x) const {
  if (x.rows() != mean.size())
    throw InvalidArgument("transform expects " + std::to_string(mean.size()) + " rows, got " +
                          std::to_string(x.rows()));
  DenseMatrix c = x;
  for (Index i = 0; i < c.rows(); ++i)
    for (double& v : c.row(i)) v -= mean[i];
  return matmul_tn(factorization.p, c);
}

ReduceResult reduce(const DenseMatrix& data, Index k, const SolverConfig& config,
                    const RegularizerSpec& spec) {
  SolverConfig cfg = config;
  cfg.rank = k;
  cfg.validate(data.rows(), data.cols());
  ReduceResult r;
  r.mean.assign(data.rows(), 0.0);
  DenseMatrix centered = data;
  for (Index i = 0; i < data.rows(); ++i) {
    auto row = centered.row(i);
    const double mu = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(data.cols());
    r.mean[i] = mu;
    for (double& v : row) v -= mu;
  }
  r.factorization = solve(centered, cfg, spec);
  const double total = frobenius_norm_squared(centered);
  const auto s = svd(centered).singular_values;
  double head = 0.0;
  for (Index i = 0; i < k && i < s.size(); ++i) head += s[i] * s[i];
  r.captured_energy = total > 0.0 ? frobenius_norm_squared(r.factorization.d) / total : 1.0;
  r.pca_captured_energy = total > 0.0 ? head / total : 1.0;
  return r;
}

}  // namespace pdq::analysis
