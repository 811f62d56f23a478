#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/generate.hpp"
#include "pdq/regularization.hpp"
#include "pdq/solver.hpp"

namespace pdq::cli {

/// Bad command line or parameters; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { factor, factor_sym, tucker, perturb, stability, scaling, compare, reduce, gen };

std::string_view to_string(Command c) noexcept;

enum class Format { mtx, csv, json };

struct RunConfig {
  Command command = Command::factor;
  std::optional<std::filesystem::path> input;
  /// Output directory; for gen, the output file.
  std::filesystem::path output = "pdq-out";
  std::optional<Format> format;
  SolverConfig solver;
  RegularizerSpec reg;
  std::size_t jobs = 1;

  std::vector<double> epsilons;
  std::size_t trials = 5;
  std::vector<double> mus;
  std::vector<Index> sizes;
  std::optional<double> density;
  std::optional<double> kappa;
  std::vector<Index> tucker_ranks;
  std::size_t repetitions = 5;
  std::size_t sweeps = 3;
  std::optional<Index> restricted_rank;

  /// gen parameters; gen.rank mirrors --rank.
  gen::Params gen;

  /// Set when --help was requested; nothing else is meaningful then.
  std::optional<std::string> help;
};

/// Parses argv without the program name. Throws UsageError. `env_seed` is the
/// value of PDQ_SEED, used when --seed is absent.
RunConfig parse_args(std::span<const std::string> args, std::optional<std::string> env_seed = std::nullopt);

/// Executes a parsed command. Returns 0 on success and 1 on numerical, file
/// or format failures (message on `err`).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with exit code 2 on usage errors; reads PDQ_SEED.
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ; honors SOURCE_DATE_EPOCH when set.
std::string current_timestamp();

}  // namespace pdq::cli
