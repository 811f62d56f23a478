#include "pdq/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pdq/io.hpp"

namespace pdq::report {
namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json header(const char* kind) { return json{{"schema", kSchema}, {"kind", kind}}; }

json reg_json(const RegularizerSpec& s) {
  return {{"kind", std::string(to_string(s.kind))}, {"lambda", s.lambda}, {"mu", s.mu}, {"nu", s.nu}};
}

json config_json(const SolverConfig& c) {
  return {{"rank", c.rank},         {"tol", c.tol},
          {"max_sweeps", c.max_sweeps}, {"seed", c.seed},
          {"init", std::string(to_string(c.init))}, {"orthonormalize", c.orthonormalize},
          {"symmetric", c.symmetric}, {"restarts", c.restarts}};
}

json stability_body(const analysis::StabilityReport& r) {
  return {{"kappa_a", num(r.kappa_a)},
          {"kappa_d", num(r.kappa_d)},
          {"alpha_estimate", num(r.alpha_estimate)},
          {"reg", reg_json(r.reg)},
          {"config", config_json(r.config)},
          {"final_objective", num(r.final_objective)},
          {"converged", r.converged}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string cell(double v) { return std::isfinite(v) ? io::format_double(v) : std::string(); }

}  // namespace

std::string to_json(const analysis::PerturbationReport& r) {
  json j = header("perturbation");
  j["epsilons"] = nums(r.epsilons);
  j["d_errors"] = nums(r.d_errors);
  j["reconstruction_errors"] = nums(r.reconstruction_errors);
  json per = json::array();
  for (const auto& v : r.trial_d_errors) per.push_back(nums(v));
  j["trial_d_errors"] = per;
  j["trials"] = r.trials;
  j["fitted_slope"] = num(r.fitted_slope);
  j["beta_estimate"] = num(r.beta_estimate);
  return dump(j);
}

std::string to_json(const analysis::StabilityReport& r) {
  json j = header("stability");
  j.update(stability_body(r));
  return dump(j);
}

std::string to_json(const analysis::StabilityTable& t) {
  json j = header("stability-table");
  j["mus"] = nums(t.mus);
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(stability_body(r));
  j["rows"] = rows;
  return dump(j);
}

std::string to_json(const analysis::UniquenessReport& r) {
  json j = header("uniqueness");
  j["seeds"] = r.seeds;
  j["objectives"] = nums(r.objectives);
  j["distances"] = nums(r.distances);
  j["max_distance"] = num(r.max_distance);
  j["max_objective_spread"] = num(r.max_objective_spread);
  j["degenerate"] = r.degenerate;
  return dump(j);
}

std::string to_json(const analysis::ScalingReport& r) {
  json j = header("scaling");
  j["sizes"] = r.sizes;
  j["k"] = r.k;
  j["density"] = r.density ? json(*r.density) : json(nullptr);
  j["per_sweep_times"] = nums(r.per_sweep_times);
  j["per_sweep_flops"] = r.per_sweep_flops;
  j["per_sweep_block_flops"] = r.per_sweep_block_flops;
  j["per_sweep_product_flops"] = r.per_sweep_product_flops;
  j["lu_flops"] = r.lu_flops;
  j["nominal_flop_ratio"] = nums(r.nominal_flop_ratio);
  j["measured_flop_ratio"] = nums(r.measured_flop_ratio);
  j["time_slope"] = num(r.time_slope);
  j["flop_slope"] = num(r.flop_slope);
  j["block_flop_slope"] = num(r.block_flop_slope);
  j["repetitions"] = r.repetitions;
  j["sweeps"] = r.sweeps;
  return dump(j);
}

std::string to_json(const analysis::BaselineTable& t) {
  json j = header("baseline");
  j["k"] = t.k;
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"method", r.method},
                    {"residual", num(r.residual)},
                    {"residual_squared", num(r.residual_squared)},
                    {"seconds", num(r.seconds)}});
  j["methods"] = rows;
  return dump(j);
}

std::string to_json(const analysis::ReduceResult& r) {
  json j = header("reduce");
  j["rank"] = r.factorization.rank();
  j["captured_energy"] = num(r.captured_energy);
  j["pca_captured_energy"] = num(r.pca_captured_energy);
  j["final_objective"] = num(r.factorization.final_objective());
  j["sweeps_used"] = r.factorization.sweeps_used;
  j["converged"] = r.factorization.converged;
  j["mean"] = nums(r.mean);
  return dump(j);
}

std::string to_json(const TuckerFactorization& f, double residual) {
  json j = header("tucker");
  j["core_shape"] = std::vector<Index>(f.core.shape().begin(), f.core.shape().end());
  json dims = json::array();
  for (const auto& p : f.factors) dims.push_back({p.rows(), p.cols()});
  j["factor_shapes"] = dims;
  j["objective_history"] = nums(f.objective_history);
  j["sweeps_used"] = f.sweeps_used;
  j["converged"] = f.converged;
  j["residual"] = num(residual);
  return dump(j);
}

std::string to_csv(const analysis::PerturbationReport& r) {
  std::ostringstream out;
  out << "epsilon,d_error,reconstruction_error\n";
  for (std::size_t i = 0; i < r.epsilons.size(); ++i)
    out << cell(r.epsilons[i]) << ',' << cell(r.d_errors[i]) << ',' << cell(r.reconstruction_errors[i]) << '\n';
  return out.str();
}

std::string to_csv(const analysis::StabilityTable& t) {
  std::ostringstream out;
  out << "mu,kappa_a,kappa_d,alpha_estimate\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    out << cell(t.mus[i]) << ',' << cell(t.rows[i].kappa_a) << ',' << cell(t.rows[i].kappa_d) << ','
        << cell(t.rows[i].alpha_estimate) << '\n';
  return out.str();
}

std::string to_csv(const analysis::UniquenessReport& r) {
  std::ostringstream out;
  out << "seed,objective,distance\n";
  for (std::size_t i = 0; i < r.seeds.size(); ++i)
    out << r.seeds[i] << ',' << cell(r.objectives[i]) << ',' << cell(r.distances[i]) << '\n';
  return out.str();
}

std::string to_csv(const analysis::ScalingReport& r) {
  std::ostringstream out;
  out << "n,per_sweep_seconds,per_sweep_flops,per_sweep_block_flops,lu_flops,measured_flop_ratio\n";
  for (std::size_t i = 0; i < r.sizes.size(); ++i)
    out << r.sizes[i] << ',' << cell(r.per_sweep_times[i]) << ',' << r.per_sweep_flops[i] << ','
        << r.per_sweep_block_flops[i] << ',' << r.lu_flops[i] << ',' << cell(r.measured_flop_ratio[i]) << '\n';
  return out.str();
}

std::string to_csv(const analysis::BaselineTable& t) {
  std::ostringstream out;
  out << "method,residual,residual_squared,seconds\n";
  for (const auto& r : t.rows)
    out << r.method << ',' << cell(r.residual) << ',' << cell(r.residual_squared) << ',' << cell(r.seconds) << '\n';
  return out.str();
}

}  // namespace pdq::report
