#pragma once

#include <string>

#include "pdq/analysis.hpp"
#include "pdq/tensor.hpp"

namespace pdq::report {

inline constexpr const char* kSchema = "pdq-report/1";

// JSON documents carry "schema": "pdq-report/1" and a "kind" tag. Non-finite
// numbers serialize as null.
std::string to_json(const analysis::PerturbationReport& r);
std::string to_json(const analysis::StabilityReport& r);
std::string to_json(const analysis::StabilityTable& t);
std::string to_json(const analysis::UniquenessReport& r);
std::string to_json(const analysis::ScalingReport& r);
std::string to_json(const analysis::BaselineTable& t);
std::string to_json(const analysis::ReduceResult& r);
std::string to_json(const TuckerFactorization& f, double residual);

// One header line plus one row per grid point / method.
std::string to_csv(const analysis::PerturbationReport& r);
std::string to_csv(const analysis::StabilityTable& t);
std::string to_csv(const analysis::UniquenessReport& r);
std::string to_csv(const analysis::ScalingReport& r);
std::string to_csv(const analysis::BaselineTable& t);

}  // namespace pdq::report
