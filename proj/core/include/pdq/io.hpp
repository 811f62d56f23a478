#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "pdq/generate.hpp"
#include "pdq/matrix.hpp"
#include "pdq/solver.hpp"
#include "pdq/tensor.hpp"

namespace pdq::io {

using gen::AnyMatrix;

/// Matrix Market: `coordinate` files load as SparseMatrix, `array` files as
/// DenseMatrix. Supports real/integer/pattern fields and general/symmetric/
/// skew-symmetric layouts. Errors carry the offending line number.
AnyMatrix read_matrix_market(std::istream& in);
AnyMatrix read_matrix_market(const std::filesystem::path& path);

/// Dense matrices are written in `array` format (column-major, as the format
/// requires), sparse ones in `coordinate` format. Values use the shortest
/// representation that round-trips exactly.
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const AnyMatrix& m);

/// CSV: a first line `rows,cols`, then one line of comma-separated values per row.
DenseMatrix read_csv(std::istream& in);
void write_csv(std::ostream& out, const DenseMatrix& m);

/// Picks the reader from the extension (.csv, otherwise Matrix Market).
AnyMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const AnyMatrix& m);

/// Tensor files: one line of JSON header {"shape": [...], "encoding": "csv"|"f64le"}
/// followed by the values in storage order (last index fastest), either as
/// comma/whitespace-separated text or as raw little-endian float64.
DenseTensor read_tensor(std::istream& in);
DenseTensor read_tensor(const std::filesystem::path& path);
void write_tensor(std::ostream& out, const DenseTensor& t, std::string_view encoding = "csv");
void write_tensor(const std::filesystem::path& path, const DenseTensor& t,
                  std::string_view encoding = "csv");

/// Deterministic JSON metadata; only `timestamp` varies between identical runs.
std::string factorization_meta_json(const Factorization& f, std::optional<double> residual,
                                    std::string_view timestamp);

/// Writes P.mtx, D.mtx, Q.mtx and meta.json under `dir` (created if needed).
void save_factorization(const std::filesystem::path& dir, const Factorization& f,
                        std::optional<double> residual, std::string_view timestamp);

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace pdq::io
