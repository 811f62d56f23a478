#include "pdq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>

#include "pdq/analysis.hpp"
#include "pdq/errors.hpp"
#include "pdq/io.hpp"
#include "pdq/linalg.hpp"
#include "pdq/report.hpp"
#include "pdq/tensor.hpp"

namespace pdq::cli {

namespace fs = std::filesystem;

namespace {

constexpr Index kMaxDensify = 2000;

// Option targets shared by all subcommands; only one subcommand is parsed.
struct Raw {
  std::string input;
  std::optional<Index> rank;
  std::string reg = "ridge";
  double lambda = 0.0, mu = 0.0, nu = 0.0;
  double tol = 1e-10;
  std::size_t max_sweeps = 500;
  std::optional<std::uint64_t> seed;
  std::string init = "svd";
  std::size_t restarts = 1;
  bool no_orthonormalize = false;
  bool symmetric = false;
  std::vector<double> epsilons;
  std::vector<Index> sizes;
  std::optional<double> density;
  std::optional<double> kappa;
  std::vector<Index> tucker_ranks;
  std::string out;
  std::string format;
  std::size_t jobs = 1;
  std::size_t trials = 5;
  std::vector<double> mus;
  std::size_t repetitions = 5;
  std::size_t sweeps = 3;
  std::optional<Index> restricted_rank;
  std::string kind;
  std::optional<Index> size;
  std::optional<Index> cols;
};

void add_input(CLI::App* sub, Raw& r, bool required) {
  auto* o = sub->add_option("input", r.input, "Input file");
  if (required) o->required();
}

void add_rank(CLI::App* sub, Raw& r, bool required, const char* what = "Factorization rank k") {
  auto* o = sub->add_option("-k,--rank", r.rank, what);
  if (required) o->required();
}

void add_seed(CLI::App* sub, Raw& r) {
  sub->add_option("--seed", r.seed, "Random seed (fallback: PDQ_SEED, then 0)");
}

void add_solver(CLI::App* sub, Raw& r) {
  sub->add_option("--tol", r.tol, "Relative objective decrease for convergence")->capture_default_str();
  sub->add_option("--max-sweeps", r.max_sweeps, "Sweep limit")->capture_default_str();
  add_seed(sub, r);
  sub->add_option("--init", r.init, "Initialization")->check(CLI::IsMember({"svd", "random"}))->capture_default_str();
  sub->add_option("--restarts", r.restarts, "Random restarts")->capture_default_str();
  sub->add_flag("--no-orthonormalize", r.no_orthonormalize, "Leave P and Q unconstrained");
  sub->add_flag("--symmetric", r.symmetric, "Solve A ~ P D P^T");
}

void add_reg(CLI::App* sub, Raw& r) {
  sub->add_option("--reg", r.reg, "Penalty kind")
      ->check(CLI::IsMember({"ridge", "lasso", "elastic", "offdiag"}))
      ->capture_default_str();
  sub->add_option("--lambda", r.lambda, "Weight on P")->capture_default_str();
  sub->add_option("--mu", r.mu, "Weight on D")->capture_default_str();
  sub->add_option("--nu", r.nu, "Weight on Q")->capture_default_str();
}

CLI::Option* add_out(CLI::App* sub, Raw& r, const char* what = "Output directory") {
  return sub->add_option("--out", r.out, what);
}

void add_format(CLI::App* sub, Raw& r, std::vector<std::string> allowed) {
  sub->add_option("--format", r.format, "Output format")->check(CLI::IsMember(std::move(allowed)));
}

void add_jobs(CLI::App* sub, Raw& r) {
  sub->add_option("--jobs", r.jobs, "Worker threads for experiment trials")->capture_default_str();
}

Command command_of(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"factor", Command::factor},   {"factor-sym", Command::factor_sym}, {"tucker", Command::tucker},
      {"perturb", Command::perturb}, {"stability", Command::stability},   {"scaling", Command::scaling},
      {"compare", Command::compare}, {"reduce", Command::reduce},         {"gen", Command::gen}};
  for (const auto& [n, c] : table)
    if (name == n) return c;
  throw UsageError("unknown command '" + name + "'");
}

Format format_of(const std::string& s) {
  if (s == "mtx") return Format::mtx;
  if (s == "csv") return Format::csv;
  return Format::json;
}

std::uint64_t parse_seed_env(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw UsageError("PDQ_SEED must be an unsigned integer, got '" + s + "'");
  return v;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void check_fields(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  require(s.rank >= 1, "--rank must be at least 1");
  require(s.tol > 0.0 && std::isfinite(s.tol), "--tol must be positive");
  require(s.max_sweeps >= 1, "--max-sweeps must be at least 1");
  require(s.restarts >= 1, "--restarts must be at least 1");
  for (double w : {c.reg.lambda, c.reg.mu, c.reg.nu})
    require(w >= 0.0 && std::isfinite(w), "--lambda, --mu and --nu must be finite and non-negative");
  require(c.jobs >= 1, "--jobs must be at least 1");
  require(c.trials >= 1, "--trials must be at least 1");
  require(c.repetitions >= 1, "--repetitions must be at least 1");
  require(c.sweeps >= 1, "--sweeps must be at least 1");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    require(c.epsilons[i] > 0.0 && std::isfinite(c.epsilons[i]), "--epsilons must be positive");
    require(i == 0 || c.epsilons[i] > c.epsilons[i - 1], "--epsilons must be strictly increasing");
  }
  for (double m : c.mus) require(m >= 0.0 && std::isfinite(m), "--mus must be non-negative");
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    require(c.sizes[i] >= 1, "--sizes must be positive");
    require(i == 0 || c.sizes[i] > c.sizes[i - 1], "--sizes must be strictly increasing");
  }
  if (c.density) require(*c.density > 0.0 && *c.density <= 1.0, "--density must lie in (0, 1]");
  if (c.kappa) require(*c.kappa >= 1.0 && std::isfinite(*c.kappa), "--kappa must be at least 1");
  for (Index r : c.tucker_ranks) require(r >= 1, "--tucker-ranks must be positive");
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::factor: return "factor";
    case Command::factor_sym: return "factor-sym";
    case Command::tucker: return "tucker";
    case Command::perturb: return "perturb";
    case Command::stability: return "stability";
    case Command::scaling: return "scaling";
    case Command::compare: return "compare";
    case Command::reduce: return "reduce";
    case Command::gen: return "gen";
  }
  return "?";
}

RunConfig parse_args(std::span<const std::string> args, std::optional<std::string> env_seed) {
  CLI::App app{"D-decomposition A ~ P D Q and numerical experiments", "pdq"};
  app.require_subcommand(1, 1);
  Raw r;

  auto* factor = app.add_subcommand("factor", "Factor a matrix as P D Q");
  add_input(factor, r, true);
  add_rank(factor, r, true);
  add_solver(factor, r);
  add_reg(factor, r);
  add_out(factor, r);
  add_format(factor, r, {"mtx", "csv"});

  auto* sym = app.add_subcommand("factor-sym", "Factor a symmetric matrix as P D P^T");
  add_input(sym, r, true);
  add_rank(sym, r, true);
  add_solver(sym, r);
  add_reg(sym, r);
  add_out(sym, r);
  add_format(sym, r, {"mtx", "csv"});

  auto* tucker = app.add_subcommand("tucker", "Tucker decomposition of a tensor file");
  add_input(tucker, r, true);
  tucker->add_option("--tucker-ranks", r.tucker_ranks, "Per-mode ranks a,b,c")->delimiter(',')->required();
  tucker->add_option("--tol", r.tol, "Relative objective decrease for convergence")->capture_default_str();
  tucker->add_option("--max-sweeps", r.max_sweeps, "Sweep limit");
  add_seed(tucker, r);
  tucker->add_option("--init", r.init, "Initialization")->check(CLI::IsMember({"svd", "random"}));
  add_out(tucker, r);
  add_format(tucker, r, {"json"});

  auto* perturb = app.add_subcommand("perturb", "Sensitivity of D to additive noise");
  add_input(perturb, r, true);
  add_rank(perturb, r, true);
  add_solver(perturb, r);
  add_reg(perturb, r);
  perturb->add_option("--epsilons", r.epsilons, "Noise norms a,b,c")->delimiter(',')->required();
  perturb->add_option("--trials", r.trials, "Noise draws per epsilon")->capture_default_str();
  add_jobs(perturb, r);
  add_out(perturb, r);
  add_format(perturb, r, {"json", "csv"});

  auto* stability = app.add_subcommand("stability", "Condition number of D versus A");
  add_input(stability, r, false);
  add_rank(stability, r, true);
  add_solver(stability, r);
  add_reg(stability, r);
  stability->add_option("--mus", r.mus, "Sweep the D weight over a,b,c")->delimiter(',');
  stability->add_option("--size", r.size, "Generated matrix size when no input is given");
  stability->add_option("--kappa", r.kappa, "Generated condition number when no input is given");
  add_jobs(stability, r);
  add_out(stability, r);
  add_format(stability, r, {"json", "csv"});

  auto* scaling = app.add_subcommand("scaling", "Per-sweep time and flop scaling in n");
  add_rank(scaling, r, true);
  add_solver(scaling, r);
  scaling->add_option("--sizes", r.sizes, "Matrix sizes a,b,c")->delimiter(',')->required();
  scaling->add_option("--density", r.density, "Use sparse matrices of this density");
  scaling->add_option("--repetitions", r.repetitions, "Timed repetitions per size")->capture_default_str();
  scaling->add_option("--sweeps", r.sweeps, "Sweeps per repetition")->capture_default_str();
  scaling->add_option("--restricted-rank", r.restricted_rank, "Rank-restricted solve with this r");
  add_out(scaling, r);
  add_format(scaling, r, {"json", "csv"});

  auto* compare = app.add_subcommand("compare", "Residuals against classical factorizations");
  add_input(compare, r, true);
  add_rank(compare, r, true);
  add_solver(compare, r);
  add_reg(compare, r);
  add_out(compare, r);
  add_format(compare, r, {"json", "csv"});

  auto* reduce = app.add_subcommand("reduce", "Dimensionality reduction of data columns");
  add_input(reduce, r, true);
  add_rank(reduce, r, true);
  add_solver(reduce, r);
  add_reg(reduce, r);
  add_out(reduce, r);
  add_format(reduce, r, {"json"});

  auto* gen = app.add_subcommand("gen", "Write a seeded synthetic matrix");
  gen->add_option("--kind", r.kind, "Matrix family")
      ->check(CLI::IsMember({"sparse", "low-rank", "ill-conditioned", "diag-dominant", "spd"}))
      ->required();
  gen->add_option("--size", r.size, "Rows (and columns unless --cols)")->required();
  gen->add_option("--cols", r.cols, "Columns");
  add_rank(gen, r, false, "Rank for low-rank");
  gen->add_option("--density", r.density, "Stored fraction for sparse");
  gen->add_option("--kappa", r.kappa, "Condition number for ill-conditioned");
  add_seed(gen, r);
  add_out(gen, r, "Output file (.mtx or .csv)")->required();
  add_format(gen, r, {"mtx", "csv"});

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  RunConfig c;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    c.help = subs.empty() ? app.help() : subs.back()->help();
    return c;
  } catch (const CLI::CallForAllHelp&) {
    c.help = app.help("", CLI::AppFormatMode::All);
    return c;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const CLI::App* sub = app.get_subcommands().front();
  c.command = command_of(sub->get_name());
  if (!r.input.empty()) c.input = r.input;
  if (!r.out.empty()) c.output = r.out;
  if (!r.format.empty()) c.format = format_of(r.format);

  c.solver.rank = r.rank.value_or(1);
  c.solver.tol = r.tol;
  c.solver.max_sweeps = r.max_sweeps;
  if (r.seed)
    c.solver.seed = *r.seed;
  else if (env_seed)
    c.solver.seed = parse_seed_env(*env_seed);
  c.solver.init = parse_init_kind(r.init);
  c.solver.restarts = r.restarts;
  c.solver.orthonormalize = !r.no_orthonormalize;
  c.solver.symmetric = r.symmetric || c.command == Command::factor_sym;
  c.reg.kind = parse_reg_kind(r.reg);
  c.reg.lambda = r.lambda;
  c.reg.mu = r.mu;
  c.reg.nu = r.nu;

  c.jobs = r.jobs;
  c.epsilons = r.epsilons;
  c.trials = r.trials;
  c.mus = r.mus;
  c.sizes = r.sizes;
  c.density = r.density;
  c.kappa = r.kappa;
  c.tucker_ranks = r.tucker_ranks;
  c.repetitions = r.repetitions;
  c.sweeps = r.sweeps;
  c.restricted_rank = r.restricted_rank;
  check_fields(c);

  if (c.command == Command::tucker && sub->count("--max-sweeps") == 0) c.solver.max_sweeps = TuckerConfig{}.max_sweeps;
  if (c.command == Command::stability && !c.input) {
    require(r.size.has_value() && c.kappa.has_value(), "stability needs an input matrix or both --size and --kappa");
    require(*r.size >= 1, "--size must be at least 1");
    c.gen.kind = gen::Kind::ill_conditioned;
    c.gen.rows = *r.size;
    c.gen.kappa = *c.kappa;
    c.gen.seed = c.solver.seed;
  }
  if (c.command == Command::scaling) require(c.sizes.size() >= 2, "--sizes needs at least two entries");
  if (c.command == Command::scaling && c.restricted_rank)
    require(*c.restricted_rank >= 1 && *c.restricted_rank <= c.solver.rank,
            "--restricted-rank must satisfy 1 <= r <= k");
  if (c.command == Command::gen) {
    c.gen.kind = gen::parse_kind(r.kind);
    c.gen.rows = *r.size;
    c.gen.cols = r.cols.value_or(0);
    c.gen.seed = c.solver.seed;
    if (c.gen.kind == gen::Kind::low_rank) require(r.rank.has_value(), "gen --kind low-rank requires --rank");
    if (c.gen.kind == gen::Kind::ill_conditioned)
      require(c.kappa.has_value(), "gen --kind ill-conditioned requires --kappa");
    c.gen.rank = r.rank.value_or(1);
    if (c.density) c.gen.density = *c.density;
    if (c.kappa) c.gen.kappa = *c.kappa;
    try {
      c.gen.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  return c;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

DenseMatrix densify(io::AnyMatrix m, Command c) {
  if (auto* d = std::get_if<DenseMatrix>(&m)) return std::move(*d);
  const auto& s = std::get<SparseMatrix>(m);
  if (s.rows() > kMaxDensify || s.cols() > kMaxDensify)
    throw UsageError(std::string(to_string(c)) + " works on dense matrices; refusing to densify a " +
                     std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                     " sparse input (limit 2000x2000)");
  return s.to_dense();
}

DenseMatrix load_dense(const RunConfig& c) { return densify(io::read_matrix(*c.input), c.command); }

std::string report_text(const RunConfig& c, const std::string& json, const std::string& csv) {
  return c.format == Format::csv ? csv : json;
}

std::string report_name(const RunConfig& c, std::string_view stem) {
  return std::string(stem) + (c.format == Format::csv ? ".csv" : ".json");
}

void write_factor_files(const RunConfig& c, const Factorization& f, double residual) {
  const std::string ts = current_timestamp();
  if (c.format == Format::csv) {
    ensure_dir(c.output);
    for (const auto& [name, m] : {std::pair{"P.csv", &f.p}, {"D.csv", &f.d}, {"Q.csv", &f.q}})
      io::write_matrix(c.output / name, *m);
    write_text(c.output / "meta.json", io::factorization_meta_json(f, residual, ts));
  } else {
    io::save_factorization(c.output, f, residual, ts);
  }
}

int run_factor(const RunConfig& c, std::ostream& out) {
  const io::AnyMatrix a = io::read_matrix(*c.input);
  Factorization f;
  double residual = 0.0;
  if (c.solver.symmetric) {
    const DenseMatrix d = densify(a, c.command);
    f = solve_symmetric(d, c.solver, c.reg);
    residual = residual_norm(d, f);
  } else if (const auto* d = std::get_if<DenseMatrix>(&a)) {
    f = solve(*d, c.solver, c.reg);
    residual = residual_norm(*d, f);
  } else {
    const auto& s = std::get<SparseMatrix>(a);
    f = solve(s, c.solver, c.reg);
    residual = std::sqrt(std::max(0.0, evaluate_objective(s, f.p, f.d, f.q, RegularizerSpec{})));
  }
  write_factor_files(c, f, residual);
  out << to_string(c.command) << ": objective=" << num(f.final_objective()) << " residual=" << num(residual)
      << " sweeps=" << f.sweeps_used << " converged=" << (f.converged ? "true" : "false")
      << " out=" << c.output.string() << "\n";
  return 0;
}

int run_tucker(const RunConfig& c, std::ostream& out) {
  const DenseTensor t = io::read_tensor(*c.input);
  require(c.tucker_ranks.size() == t.order(), "--tucker-ranks needs " + std::to_string(t.order()) +
                                                  " entries for this tensor");
  TuckerConfig tc;
  tc.tol = c.solver.tol;
  tc.max_sweeps = c.solver.max_sweeps;
  tc.seed = c.solver.seed;
  tc.init = c.solver.init;
  const TuckerFactorization f = tucker_solve(t, c.tucker_ranks, tc);
  DenseTensor diff = tucker_reconstruct(f);
  for (Index i = 0; i < diff.size(); ++i) diff.data()[i] -= t.data()[i];
  const double residual = frobenius_norm(diff);
  ensure_dir(c.output);
  io::write_tensor(c.output / "core.tensor", f.core);
  for (std::size_t i = 0; i < f.factors.size(); ++i)
    io::write_matrix(c.output / ("factor_" + std::to_string(i) + ".mtx"), f.factors[i]);
  write_text(c.output / "tucker.json", report::to_json(f, residual));
  out << "tucker: objective=" << num(f.objective_history.back()) << " residual=" << num(residual)
      << " sweeps=" << f.sweeps_used << " converged=" << (f.converged ? "true" : "false")
      << " out=" << c.output.string() << "\n";
  return 0;
}

int run_perturb(const RunConfig& c, std::ostream& out) {
  const DenseMatrix a = load_dense(c);
  const auto r = analysis::perturbation_experiment(a, c.epsilons, c.solver, c.reg, c.trials, c.jobs);
  ensure_dir(c.output);
  write_text(c.output / report_name(c, "perturb"), report_text(c, report::to_json(r), report::to_csv(r)));
  out << "perturb: slope=" << num(r.fitted_slope) << " beta=" << num(r.beta_estimate) << " trials=" << r.trials
      << " out=" << c.output.string() << "\n";
  return 0;
}

int run_stability(const RunConfig& c, std::ostream& out) {
  const DenseMatrix a = c.input ? load_dense(c) : std::get<DenseMatrix>(gen::generate(c.gen));
  ensure_dir(c.output);
  if (c.mus.empty()) {
    const auto r = analysis::stability_experiment(a, c.solver, c.reg);
    const analysis::StabilityTable one{{c.reg.mu}, {r}};
    write_text(c.output / report_name(c, "stability"), report_text(c, report::to_json(r), report::to_csv(one)));
    out << "stability: kappa_a=" << num(r.kappa_a) << " kappa_d=" << num(r.kappa_d)
        << " alpha=" << num(r.alpha_estimate) << " out=" << c.output.string() << "\n";
    return 0;
  }
  const auto t = analysis::stability_sweep(a, c.solver, c.reg, c.mus, c.jobs);
  write_text(c.output / report_name(c, "stability"), report_text(c, report::to_json(t), report::to_csv(t)));
  out << "stability: kappa_a=" << num(t.rows.front().kappa_a) << " kappa_d=";
  for (std::size_t i = 0; i < t.rows.size(); ++i) out << (i ? "," : "") << num(t.rows[i].kappa_d);
  out << " out=" << c.output.string() << "\n";
  return 0;
}

int run_scaling(const RunConfig& c, std::ostream& out) {
  analysis::ScalingOptions o;
  o.repetitions = c.repetitions;
  o.sweeps = c.sweeps;
  o.restricted_rank = c.restricted_rank;
  const auto r = analysis::scaling_experiment(c.sizes, c.solver.rank, c.density, c.solver, o);
  ensure_dir(c.output);
  write_text(c.output / report_name(c, "scaling"), report_text(c, report::to_json(r), report::to_csv(r)));
  out << "scaling: flop_slope=" << num(r.flop_slope) << " time_slope=" << num(r.time_slope)
      << " block_flop_slope=" << num(r.block_flop_slope) << " out=" << c.output.string() << "\n";
  return 0;
}

int run_compare(const RunConfig& c, std::ostream& out) {
  const DenseMatrix a = load_dense(c);
  const auto t = analysis::baseline_compare(a, c.solver.rank, c.solver, c.reg);
  ensure_dir(c.output);
  write_text(c.output / report_name(c, "compare"), report_text(c, report::to_json(t), report::to_csv(t)));
  out << "compare:";
  for (const auto& row : t.rows) out << " " << row.method << "=" << num(row.residual);
  out << " out=" << c.output.string() << "\n";
  return 0;
}

int run_reduce(const RunConfig& c, std::ostream& out) {
  const DenseMatrix a = load_dense(c);
  const auto r = analysis::reduce(a, c.solver.rank, c.solver, c.reg);
  ensure_dir(c.output);
  io::write_matrix(c.output / "P.mtx", r.factorization.p);
  write_text(c.output / "reduce.json", report::to_json(r));
  out << "reduce: captured-energy=" << num(r.captured_energy) << " pca-captured-energy="
      << num(r.pca_captured_energy) << " sweeps=" << r.factorization.sweeps_used
      << " out=" << c.output.string() << "\n";
  return 0;
}

int run_gen(const RunConfig& c, std::ostream& out) {
  const io::AnyMatrix m = gen::generate(c.gen);
  if (c.output.has_parent_path()) ensure_dir(c.output.parent_path());
  if (c.format == Format::csv) {
    const auto* d = std::get_if<DenseMatrix>(&m);
    require(d != nullptr, "--format csv supports dense kinds only");
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + c.output.string() + "'");
    io::write_csv(f, *d);
  } else if (c.format == Format::mtx) {
    io::write_matrix_market(c.output, m);
  } else {
    io::write_matrix(c.output, m);
  }
  const Index rows = std::visit([](const auto& x) { return x.rows(); }, m);
  const Index cols = std::visit([](const auto& x) { return x.cols(); }, m);
  out << "gen: kind=" << gen::to_string(c.gen.kind) << " rows=" << rows << " cols=" << cols;
  if (const auto* s = std::get_if<SparseMatrix>(&m)) out << " nnz=" << s->nnz() << " density=" << num(s->density());
  out << " out=" << c.output.string() << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.help) {
    out << *c.help;
    return 0;
  }
  try {
    switch (c.command) {
      case Command::factor:
      case Command::factor_sym: return run_factor(c, out);
      case Command::tucker: return run_tucker(c, out);
      case Command::perturb: return run_perturb(c, out);
      case Command::stability: return run_stability(c, out);
      case Command::scaling: return run_scaling(c, out);
      case Command::compare: return run_compare(c, out);
      case Command::reduce: return run_reduce(c, out);
      case Command::gen: return run_gen(c, out);
    }
  } catch (const UsageError& e) {
    err << "pdq: error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "pdq: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "pdq: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    const char* env = std::getenv("PDQ_SEED");
    c = parse_args(args, env ? std::optional<std::string>(env) : std::nullopt);
  } catch (const UsageError& e) {
    err << "pdq: error: " << e.what() << "\nRun 'pdq --help' for usage.\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "pdq: error: " << e.what() << "\nRun 'pdq --help' for usage.\n";
    return 2;
  }
  return run(c, out, err);
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    long long v = 0;
    const std::string_view s(epoch);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pdq::cli
