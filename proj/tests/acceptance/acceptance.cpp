// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdq/analysis.hpp"
#include "pdq/generate.hpp"
#include "pdq/io.hpp"
#include "pdq/linalg.hpp"
#include "pdq/solver.hpp"
#include "pdq/tensor.hpp"
#include "support.hpp"

using namespace pdq;
using pdq::testing::Cases;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome eckart_young() {
  const auto t0 = std::chrono::steady_clock::now();
  Cases cases(1001);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = cases.size(2, 64), m = cases.size(2, 64);
    const DenseMatrix a = cases.matrix(n, m);
    SolverConfig c;
    c.rank = cases.size(1, std::min(n, m) - 1);
    const Factorization f = solve(a, c, RegularizerSpec{});
    const double tail = pdq::testing::oracle_tail(a, c.rank);
    worst = std::max(worst, std::abs(f.final_objective() - tail) / tail);
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 10.0, fmt("max relative error %.3g over 50 matrices, %.2f s", worst, secs)};
}

Outcome monotone_descent() {
  Cases cases(1002);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = cases.size(3, 30), m = cases.size(3, 30);
    const DenseMatrix a = cases.matrix(n, m);
    SolverConfig c;
    c.rank = cases.size(1, std::min(n, m));
    c.seed = cases.seed();
    c.init = t % 2 ? InitKind::random : InitKind::svd;
    c.orthonormalize = t % 4 < 2;
    c.max_sweeps = 200;
    RegularizerSpec spec;
    spec.kind = t % 3 == 0 ? RegKind::lasso : RegKind::ridge;
    spec.lambda = cases.uniform(0.05, 1.0);
    spec.mu = cases.uniform(0.0, 1.0);
    spec.nu = cases.uniform(0.05, 1.0);
    const Factorization f = solve(a, c, spec);
    for (std::size_t i = 1; i < f.objective_history.size(); ++i, ++steps) {
      const double prev = f.objective_history[i - 1];
      worst = std::max(worst, (f.objective_history[i] - prev) / prev);
    }
  }
  return {worst <= 1e-12, fmt("largest relative step %.3g over %zu steps in 200 problems", worst, steps)};
}

Outcome exact_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (Index n : {50, 100, 200}) {
    const DenseMatrix a = gen::low_rank(n, n, 5, 1003 + n);
    SolverConfig c;
    c.rank = 5;
    const Factorization f = solve(a, c, RegularizerSpec{});
    worst = std::max(worst, residual_norm(a, f) / frobenius_norm(a));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 5.0, fmt("max residual/|A| %.3g at n = 50, 100, 200, %.2f s", worst, secs)};
}

Outcome perturbation() {
  const auto t0 = std::chrono::steady_clock::now();
  const DenseMatrix a0 = gen::low_rank(60, 60, 5, 1004);
  const std::vector<double> eps{1e-4, 1e-3, 1e-2, 1e-1};
  SolverConfig c;
  c.rank = 5;
  const auto r = analysis::perturbation_experiment(a0, eps, c, RegularizerSpec{}, 5);
  const double secs = seconds_since(t0);
  const bool ok = r.fitted_slope >= 0.7 && r.fitted_slope <= 1.3 && std::isfinite(r.beta_estimate) && secs < 60.0;
  return {ok, fmt("slope %.4f, beta %.4g, %.2f s", r.fitted_slope, r.beta_estimate, secs)};
}

Outcome complexity() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Index> sizes{256, 512, 1024, 2048};
  const auto dense = analysis::scaling_experiment(sizes, 16, std::nullopt, SolverConfig{});
  analysis::ScalingOptions o;
  o.restricted_rank = 8;
  const auto restricted = analysis::scaling_experiment(sizes, 16, std::nullopt, SolverConfig{}, o);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(dense.flop_slope - 2.0) <= 0.1 && dense.time_slope >= 1.6 && dense.time_slope <= 2.4 &&
                  std::abs(restricted.block_flop_slope - 1.0) <= 0.2 && secs < 300.0;
  return {ok, fmt("flop slope %.4f, time slope %.4f, restricted block slope %.4f, %.1f s", dense.flop_slope,
                  dense.time_slope, restricted.block_flop_slope, secs)};
}

Outcome stability() {
  const auto t0 = std::chrono::steady_clock::now();
  const DenseMatrix a = gen::ill_conditioned(200, 1e6, 1006);
  SolverConfig c;
  c.rank = 20;
  c.orthonormalize = false;
  RegularizerSpec ridge;
  ridge.lambda = ridge.mu = ridge.nu = 1e-2;
  const auto with = analysis::stability_experiment(a, c, ridge);
  const auto without = analysis::stability_experiment(a, c, RegularizerSpec{});
  const double secs = seconds_since(t0);
  const bool ok = with.kappa_d < without.kappa_d && std::isfinite(with.alpha_estimate) && secs < 30.0;
  return {ok, fmt("kappa(A) %.4g, kappa(D) %.4g with ridge vs %.4g without, alpha %.4g, %.2f s", with.kappa_a,
                  with.kappa_d, without.kappa_d, with.alpha_estimate, secs)};
}

DenseTensor random_tensor(Cases& cases, const std::vector<Index>& shape) {
  DenseTensor t(shape);
  Rng rng(cases.seed());
  for (double& v : t.data()) v = rng.normal();
  return t;
}

double tensor_diff(const DenseTensor& a, const DenseTensor& b) {
  double d = 0.0;
  for (Index i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

// Mode product from its index-sum definition.
DenseTensor naive_mode_product(const DenseTensor& t, const DenseMatrix& m, std::size_t mode) {
  std::vector<Index> shape(t.shape().begin(), t.shape().end());
  shape[mode] = m.rows();
  DenseTensor out(shape);
  std::vector<Index> idx(shape.size());
  for (Index lin = 0; lin < out.size(); ++lin) {
    Index rem = lin;
    for (std::size_t d = shape.size(); d-- > 0;) {
      idx[d] = rem % shape[d];
      rem /= shape[d];
    }
    std::vector<Index> src = idx;
    double s = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
      src[mode] = j;
      s += m(idx[mode], j) * t.at(src);
    }
    out.at(idx) = s;
  }
  return out;
}

Outcome tucker() {
  const auto t0 = std::chrono::steady_clock::now();
  Cases cases(1007);
  const std::vector<Index> shape{12, 10, 8};
  DenseTensor t = random_tensor(cases, {3, 3, 3});
  for (std::size_t m = 0; m < 3; ++m)
    t = mode_product(t, gen::random_orthogonal(shape[m], cases.seed()).leading_cols(3), m);
  const std::vector<Index> ranks{3, 3, 3};
  DenseTensor diff = tucker_reconstruct(tucker_solve(t, ranks));
  for (Index i = 0; i < diff.size(); ++i) diff.data()[i] -= t.data()[i];
  const double rel = frobenius_norm(diff) / frobenius_norm(t);

  std::size_t roundtrip_failures = 0, product_failures = 0;
  double worst_product = 0.0;
  for (int c = 0; c < 100; ++c) {
    std::vector<Index> s(cases.size(1, 4));
    for (auto& n : s) n = cases.size(1, 6);
    const DenseTensor x = random_tensor(cases, s);
    for (std::size_t mode = 0; mode < s.size(); ++mode)
      if (!(fold(unfold(x, mode), mode, x.shape()) == x)) ++roundtrip_failures;
    const std::size_t mode = cases.size(0, s.size() - 1);
    const DenseMatrix m = cases.matrix(cases.size(1, 5), s[mode]);
    const DenseTensor got = mode_product(x, m, mode);
    std::vector<Index> out_shape = s;
    out_shape[mode] = m.rows();
    const double e = std::max(tensor_diff(got, naive_mode_product(x, m, mode)),
                              tensor_diff(got, fold(matmul(m, unfold(x, mode)), mode, out_shape)));
    worst_product = std::max(worst_product, e);
    if (e > 1e-12) ++product_failures;
  }
  const double secs = seconds_since(t0);
  const bool ok = rel <= 1e-8 && roundtrip_failures == 0 && product_failures == 0 && secs < 30.0;
  return {ok, fmt("(3,3,3) residual/|t| %.3g, %zu roundtrip and %zu mode-product failures in 100 cases "
                  "(max err %.3g), %.2f s",
                  rel, roundtrip_failures, product_failures, worst_product, secs)};
}

Outcome baseline() {
  Cases cases(1008);
  double undercut = -std::numeric_limits<double>::infinity();
  double random_gap = 0.0;
  for (int t = 0; t < 30; ++t) {
    const Index n = cases.size(4, 40), m = cases.size(4, 40);
    const DenseMatrix a = cases.matrix(n, m);
    const Index k = cases.size(1, std::min(n, m) - 1);
    const double norm_a = frobenius_norm(a);

    SolverConfig svd_init;
    svd_init.rank = k;
    RegularizerSpec ridge;
    ridge.mu = cases.uniform(0.0, 0.5);
    for (const RegularizerSpec& spec : {RegularizerSpec{}, ridge}) {
      const auto tab = analysis::baseline_compare(a, k, svd_init, spec);
      undercut = std::max(undercut, (tab.find("truncated-svd")->residual - tab.find("d-decomposition")->residual) /
                                        norm_a);
    }

    SolverConfig random = svd_init;
    random.init = InitKind::random;
    random.restarts = 3;
    random.seed = cases.seed();
    const auto tab = analysis::baseline_compare(a, k, random, RegularizerSpec{});
    const double svd = tab.find("truncated-svd")->residual;
    const double d = tab.find("d-decomposition")->residual;
    undercut = std::max(undercut, (svd - d) / norm_a);
    random_gap = std::max(random_gap, std::abs(d - svd) / svd);
  }
  const bool ok = undercut <= 1e-9 && random_gap <= 1e-6;
  return {ok, fmt("largest undercut %.3g of |A|, random-init gap %.3g relative (30 matrices, 3 restarts)", undercut,
                  random_gap)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism_and_io() {
  const fs::path dir = fs::temp_directory_path() / "pdq_acceptance_io";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = PDQ_CLI_PATH;
  auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); };

  bool files_equal = true;
  std::string note;
  {
    const std::string a = (dir / "A.mtx").string();
    const std::string s = (dir / "S.mtx").string();
    if (sh("\"" + cli + "\" gen --kind low-rank --size 80 --rank 8 --seed 5 --out \"" + a + "\"") != 0 ||
        sh("\"" + cli + "\" gen --kind sparse --size 300 --density 0.05 --seed 5 --out \"" + s + "\"") != 0)
      return {false, "gen invocation failed"};
    const std::vector<std::pair<std::string, std::string>> runs{
        {a, "-k 6 --init random --restarts 3 --seed 9"}, {s, "-k 4 --seed 9"}, {a, "-k 5 --reg lasso --mu 0.1"}};
    for (std::size_t r = 0; r < runs.size(); ++r) {
      for (const char* rep : {"x", "y"}) {
        const fs::path out = dir / (std::to_string(r) + rep);
        if (sh("\"" + cli + "\" factor \"" + runs[r].first + "\" " + runs[r].second + " --out \"" + out.string() + "\"") != 0)
          return {false, "factor invocation failed"};
      }
      for (const char* name : {"P.mtx", "D.mtx", "Q.mtx"})
        if (slurp(dir / (std::to_string(r) + "x") / name) != slurp(dir / (std::to_string(r) + "y") / name))
          files_equal = false;
      auto mx = nlohmann::json::parse(slurp(dir / (std::to_string(r) + "x") / "meta.json"));
      auto my = nlohmann::json::parse(slurp(dir / (std::to_string(r) + "y") / "meta.json"));
      mx.erase("timestamp");
      my.erase("timestamp");
      if (mx != my) files_equal = false;
    }
  }

  Cases cases(1009);
  std::size_t failures = 0;
  for (int t = 0; t < 50; ++t) {
    DenseMatrix d(cases.size(1, 30), cases.size(1, 30));
    for (double& v : d.data()) v = cases.uniform(-1, 1) * std::pow(10.0, cases.uniform(-300, 300));
    std::stringstream ds;
    io::write_matrix_market(ds, d);
    if (!(std::get<DenseMatrix>(io::read_matrix_market(ds)) == d)) ++failures;

    const SparseMatrix s = gen::sparse(cases.size(1, 60), cases.size(1, 60), cases.uniform(0.01, 0.5), cases.seed());
    std::stringstream ss;
    io::write_matrix_market(ss, s);
    if (!(std::get<SparseMatrix>(io::read_matrix_market(ss)) == s)) ++failures;
  }
  fs::remove_all(dir);
  return {files_equal && failures == 0,
          fmt("repeated CLI factor runs %s; %zu of 100 Matrix Market round-trips inexact",
              files_equal ? "byte-identical" : "DIFFER", failures)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"eckart-young oracle", eckart_young},
      {"monotone descent", monotone_descent},
      {"exact rank-5 recovery", exact_recovery},
      {"perturbation scaling", perturbation},
      {"complexity slope", complexity},
      {"stability", stability},
      {"tucker correctness", tucker},
      {"baseline sanity", baseline},
      {"determinism and i/o", determinism_and_io},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
