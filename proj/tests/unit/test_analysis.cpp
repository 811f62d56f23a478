#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "pdq/analysis.hpp"
#include "pdq/errors.hpp"
#include "pdq/generate.hpp"
#include "pdq/linalg.hpp"
#include "pdq/report.hpp"
#include "support.hpp"

using namespace pdq;
using namespace pdq::analysis;

namespace {

SolverConfig config_for(Index k) {
  SolverConfig c;
  c.rank = k;
  return c;
}

}  // namespace

TEST(LogLogSlope, ExactPowerLaw) {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 12, 48, 192};
  EXPECT_NEAR(fit_loglog_slope(x, y), 2.0, 1e-12);
  const std::vector<double> one{1}, neg{1, -1};
  EXPECT_THROW(fit_loglog_slope(one, one), InvalidArgument);
  const std::vector<double> two{1, 2};
  EXPECT_THROW(fit_loglog_slope(neg, two), InvalidArgument);
}

TEST(Perturbation, ZeroNoiseReproducesBase) {
  const DenseMatrix a0 = gen::low_rank(30, 30, 4, 1);
  const SolverConfig c = config_for(4);
  const Factorization base = solve(a0, c, {});
  const auto t = perturbation_trial(a0, base, 0.0, 7, c, {});
  EXPECT_LE(t.d_error, 1e-12 * frobenius_norm(a0));
  EXPECT_LE(t.reconstruction_error, 1e-10 * frobenius_norm(a0));
}

TEST(Perturbation, LinearInEpsilon) {
  const DenseMatrix a0 = gen::low_rank(40, 40, 4, 2);
  const std::vector<double> eps{1e-6, 1e-5, 1e-4, 1e-3};
  const auto r = perturbation_experiment(a0, eps, config_for(4), {}, 3);
  ASSERT_EQ(r.d_errors.size(), 4u);
  EXPECT_EQ(r.trials, 3u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_GT(r.d_errors[i], r.d_errors[i - 1]);
  EXPECT_NEAR(r.fitted_slope, 1.0, 0.1);
  EXPECT_GT(r.beta_estimate, 0.0);
  EXPECT_LT(r.beta_estimate, 10.0);
}

TEST(Perturbation, ParallelMatchesSerial) {
  const DenseMatrix a0 = gen::low_rank(20, 20, 3, 3);
  const std::vector<double> eps{1e-4, 1e-3};
  const auto a = perturbation_experiment(a0, eps, config_for(3), {}, 4, 1);
  const auto b = perturbation_experiment(a0, eps, config_for(3), {}, 4, 3);
  EXPECT_EQ(a.trial_d_errors, b.trial_d_errors);
  EXPECT_EQ(a.fitted_slope, b.fitted_slope);
}

TEST(Perturbation, Validation) {
  const DenseMatrix a0 = gen::low_rank(10, 10, 2, 3);
  const std::vector<double> eps{1e-3, 1e-4}, zero{0.0, 1e-3}, ok{1e-4, 1e-3};
  EXPECT_THROW(perturbation_experiment(a0, eps, config_for(2), {}, 1), InvalidArgument);
  EXPECT_THROW(perturbation_experiment(a0, zero, config_for(2), {}, 1), InvalidArgument);
  SolverConfig random = config_for(2);
  random.init = InitKind::random;
  EXPECT_THROW(perturbation_experiment(a0, ok, random, {}, 1), InvalidArgument);
  EXPECT_THROW(perturbation_experiment(a0, ok, config_for(2), {}, 0), InvalidArgument);
}

TEST(Stability, IdentityIsPerfectlyConditioned) {
  const auto r = stability_experiment(DenseMatrix::identity(8), config_for(8), {});
  EXPECT_NEAR(r.kappa_a, 1.0, 1e-12);
  EXPECT_NEAR(r.kappa_d, 1.0, 1e-10);
  EXPECT_NEAR(r.alpha_estimate, 1.0, 1e-10);
}

TEST(Stability, RidgeImprovesConditioningOfUnconstrainedD) {
  // sigma_4 = 1e-6^(3/39) stays above the level where three-factor ridge
  // shrinks a component to zero.
  const DenseMatrix a = gen::ill_conditioned(40, 1e6, 4);
  SolverConfig c = config_for(4);
  c.orthonormalize = false;
  c.max_sweeps = 300;
  RegularizerSpec ridge;
  ridge.lambda = ridge.mu = ridge.nu = 1e-2;
  const auto with = stability_experiment(a, c, ridge);
  const auto without = stability_experiment(a, c, {});
  EXPECT_NEAR(with.kappa_a, 1e6, 1e4);
  EXPECT_LT(with.kappa_d, without.kappa_d);
}

TEST(Stability, SweepReplacesMu) {
  const DenseMatrix a = gen::ill_conditioned(12, 1e3, 5);
  const std::vector<double> mus{0.0, 1e-3, 1e-2};
  const auto t = stability_sweep(a, config_for(4), {}, mus, 2);
  ASSERT_EQ(t.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.rows[i].reg.mu, mus[i]);
}

TEST(Uniqueness, SameSeedGivesZeroDistance) {
  const DenseMatrix a = gen::low_rank(20, 15, 5, 6) + 0.01 * Rng(1).gaussian(20, 15);
  SolverConfig c = config_for(4);
  c.init = InitKind::random;
  const std::vector<std::uint64_t> seeds{3, 3};
  const auto r = uniqueness_experiment(a, c, {}, seeds);
  EXPECT_EQ(r.distances[1], 0.0);
  EXPECT_EQ(r.max_objective_spread, 0.0);
}

TEST(Uniqueness, DiagDominantLassoIsUnique) {
  const DenseMatrix a = gen::diag_dominant(20, 7);
  SolverConfig c = config_for(5);
  c.init = InitKind::random;
  c.max_sweeps = 20000;
  RegularizerSpec lasso;
  lasso.kind = RegKind::lasso;
  lasso.mu = 1.0;
  const auto r = uniqueness_experiment(a, c, lasso, 5);
  EXPECT_EQ(r.seeds.size(), 5u);
  EXPECT_FALSE(r.degenerate);
  EXPECT_LE(r.max_objective_spread, 1e-6);
  EXPECT_LT(r.max_distance, 1.0);
}

TEST(Uniqueness, OffdiagPenaltyFixesTheGauge) {
  const std::vector<double> sigma{10, 7, 4, 2, 1, 0.5};
  const DenseMatrix a = gen::with_singular_values(16, 12, sigma, 8);
  SolverConfig c = config_for(3);
  c.init = InitKind::random;
  c.tol = 1e-14;
  c.max_sweeps = 5000;
  RegularizerSpec offdiag;
  offdiag.kind = RegKind::offdiag;
  offdiag.mu = 1.0;
  const auto r = uniqueness_experiment(a, c, offdiag, 4);
  EXPECT_LE(r.max_objective_spread, 1e-8);
  EXPECT_LE(r.max_distance, 1e-4);
}

TEST(Uniqueness, FlagsDegenerateSpectrum) {
  SolverConfig c = config_for(3);
  c.init = InitKind::random;
  const auto r = uniqueness_experiment(DenseMatrix::identity(6), c, {}, 2);
  EXPECT_TRUE(r.degenerate);
  SolverConfig svd = config_for(3);
  EXPECT_THROW(uniqueness_experiment(DenseMatrix::identity(6), svd, {}, 2), InvalidArgument);
  EXPECT_THROW(uniqueness_experiment(DenseMatrix::identity(6), c, {}, 1), InvalidArgument);
}

TEST(Scaling, RequiresTwoIncreasingSizes) {
  const std::vector<Index> one{64}, dec{64, 32};
  EXPECT_THROW(scaling_experiment(one, 4, std::nullopt, {}), InvalidArgument);
  EXPECT_THROW(scaling_experiment(dec, 4, std::nullopt, {}), InvalidArgument);
}

TEST(Scaling, FlopCountsAreDeterministic) {
  const std::vector<Index> sizes{32, 64, 128};
  ScalingOptions o;
  o.repetitions = 2;
  o.sweeps = 2;
  const auto a = scaling_experiment(sizes, 4, std::nullopt, {}, o);
  const auto b = scaling_experiment(sizes, 4, std::nullopt, {}, o);
  EXPECT_EQ(a.per_sweep_flops, b.per_sweep_flops);
  EXPECT_EQ(a.flop_slope, b.flop_slope);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::uint64_t n = sizes[i];
    EXPECT_EQ(a.per_sweep_product_flops[i], 4 * n * n * 4);
    EXPECT_EQ(a.lu_flops[i], 2 * n * n * n / 3);
    EXPECT_DOUBLE_EQ(a.nominal_flop_ratio[i], static_cast<double>(n) / 12.0);
  }
  EXPECT_GT(a.flop_slope, 1.5);
  EXPECT_LT(a.flop_slope, 2.1);
}

TEST(Scaling, SparseProductFlopsTrackNnz) {
  const std::vector<Index> sizes{100, 200};
  ScalingOptions o;
  o.repetitions = 1;
  o.sweeps = 1;
  const auto r = scaling_experiment(sizes, 5, 0.05, {}, o);
  for (std::size_t i = 0; i < 2; ++i) {
    const SparseMatrix s = gen::sparse(sizes[i], sizes[i], 0.05, derive_seed(0, sizes[i]));
    EXPECT_EQ(r.per_sweep_product_flops[i], 4 * s.nnz() * 5);
  }
}

TEST(Scaling, SparseFlopRatioAgainstLu) {
  const std::vector<Index> sizes{500, 1000};
  ScalingOptions o;
  o.repetitions = 1;
  o.sweeps = 1;
  const auto r = scaling_experiment(sizes, 100, 0.10, {}, o);
  EXPECT_NEAR(r.nominal_flop_ratio[1], 1000.0 / 300.0, 1e-12);
  EXPECT_GT(r.measured_flop_ratio[1], 1.0);
  EXPECT_DOUBLE_EQ(r.measured_flop_ratio[1],
                   static_cast<double>(r.lu_flops[1]) / static_cast<double>(r.per_sweep_flops[1]));
}

TEST(Baseline, ExactRankIsRecoveredByBoth) {
  const DenseMatrix a = gen::low_rank(30, 25, 4, 12);
  const auto tab = baseline_compare(a, 4, config_for(4), {});
  EXPECT_LE(tab.find("d-decomposition")->residual, 1e-8 * frobenius_norm(a));
  EXPECT_LE(tab.find("truncated-svd")->residual, 1e-8 * frobenius_norm(a));
}

TEST(Baseline, SeededHundredSquareMatchesSvd) {
  const DenseMatrix a = Rng(13).gaussian(100, 100);
  const auto tab = baseline_compare(a, 10, config_for(10), {});
  ASSERT_EQ(tab.rows.size(), 4u);
  const double svd = tab.find("truncated-svd")->residual;
  EXPECT_NEAR(tab.find("d-decomposition")->residual, svd, 1e-6 * svd);
}

TEST(Baseline, TruncatedSvdIsOptimal) {
  pdq::testing::Cases cases(71);
  for (int t = 0; t < 10; ++t) {
    const Index n = cases.size(4, 20), m = cases.size(4, 20);
    const DenseMatrix a = cases.matrix(n, m);
    const Index k = cases.size(1, std::min(n, m));
    const auto tab = baseline_compare(a, k, config_for(k), {});
    const BaselineRow* svd = tab.find("truncated-svd");
    const BaselineRow* d = tab.find("d-decomposition");
    const BaselineRow* qr = tab.find("qr-rank-k");
    ASSERT_TRUE(svd && d && qr);
    EXPECT_NEAR(svd->residual_squared, pdq::testing::oracle_tail(a, k), 1e-9 * frobenius_norm_squared(a));
    EXPECT_GE(d->residual_squared, svd->residual_squared - 1e-9 * frobenius_norm_squared(a));
    EXPECT_GE(qr->residual_squared, svd->residual_squared - 1e-9 * frobenius_norm_squared(a));
    EXPECT_EQ(tab.find("lu-full") != nullptr, n == m);
    if (n == m) {
      EXPECT_LE(tab.find("lu-full")->residual, 1e-8 * frobenius_norm(a));
    }
  }
  EXPECT_EQ(baseline_compare(DenseMatrix::identity(3), 1, config_for(1), {}).find("nope"), nullptr);
}

TEST(Reduce, ExactRankCapturesAllEnergy) {
  const DenseMatrix data = gen::low_rank(30, 50, 4, 9);
  const auto r = reduce(data, 5, config_for(5), {});
  EXPECT_NEAR(r.captured_energy, 1.0, 1e-8);
  EXPECT_NEAR(r.pca_captured_energy, 1.0, 1e-8);
  EXPECT_EQ(r.mean.size(), 30u);
  const DenseMatrix z = r.transform(data);
  EXPECT_EQ(z.rows(), 5u);
  EXPECT_EQ(z.cols(), 50u);
}

TEST(Reduce, MatchesPcaOnNoisyData) {
  const DenseMatrix data = gen::low_rank_plus_noise(40, 120, 5, 0.01, 10);
  const auto r = reduce(data, 5, config_for(5), {});
  EXPECT_NEAR(r.captured_energy, r.pca_captured_energy, 0.01 * r.pca_captured_energy);
  EXPECT_LE(r.captured_energy, r.pca_captured_energy + 1e-12);
}

TEST(Reduce, SweepCostIsLinearInDataCount) {
  std::vector<double> ms, product, total;
  for (Index m : {100, 200, 400}) {
    const DenseMatrix data = Rng(m).gaussian(300, m);
    SolverConfig c = config_for(20);
    c.max_sweeps = 3;
    c.fixed_sweeps = true;
    const auto r = reduce(data, 20, c, {});
    ASSERT_EQ(r.factorization.sweep_flops.size(), 3u);
    ms.push_back(static_cast<double>(m));
    product.push_back(static_cast<double>(r.factorization.sweep_flops[0].product));
    total.push_back(static_cast<double>(r.factorization.sweep_flops[0].total()));
  }
  EXPECT_NEAR(fit_loglog_slope(ms, product), 1.0, 1e-12);
  EXPECT_GT(fit_loglog_slope(ms, total), 0.8);
  EXPECT_LT(fit_loglog_slope(ms, total), 1.05);
}

TEST(Reduce, MeanIsColumnAverage) {
  const DenseMatrix data{{1, 3}, {2, 6}};
  const auto r = reduce(data, 1, config_for(1), {});
  EXPECT_DOUBLE_EQ(r.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(r.mean[1], 4.0);
  const DenseMatrix z = r.transform(DenseMatrix{{2}, {4}});
  EXPECT_NEAR(z(0, 0), 0.0, 1e-15);
}

TEST(Report, JsonCarriesSchemaAndKind) {
  const DenseMatrix a = gen::low_rank(12, 12, 2, 11);
  const auto tab = baseline_compare(a, 2, config_for(2), {});
  const auto j = nlohmann::json::parse(report::to_json(tab));
  EXPECT_EQ(j["schema"], report::kSchema);
  EXPECT_TRUE(j.contains("kind"));
  EXPECT_EQ(j["methods"].size(), 4u);
  const std::string csv = report::to_csv(tab);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
