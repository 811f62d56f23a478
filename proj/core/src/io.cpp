#include "pdq/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "pdq/errors.hpp"

namespace pdq::io {
namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError("invalid number '" + std::string(tok) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(tok) + "'", line);
  return v;
}

Index parse_index(std::string_view tok, std::size_t line) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("invalid integer '" + std::string(tok) + "'", line);
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      std::string_view tok = s.substr(start, i - start);
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
      out.push_back(tok);
      start = i + 1;
    }
  }
  return out;
}

bool blank_or_comment(const std::string& line);

// Anything but blank or comment lines after the declared entries is an error.
void reject_trailing(std::istream& in, std::size_t& lineno) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) throw ParseError("data after the last declared entry", lineno);
  }
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "': file not found or unreadable");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

AnyMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market stream", 1);
  ++lineno;
  const auto head = split_ws(line);
  if (head.size() < 5 || head[0] != "%%MatrixMarket" || lower(std::string(head[1])) != "matrix")
    throw ParseError("missing '%%MatrixMarket matrix' banner", lineno);
  const std::string format = lower(std::string(head[2]));
  const std::string field = lower(std::string(head[3]));
  const std::string symmetry = lower(std::string(head[4]));
  if (format != "coordinate" && format != "array") throw ParseError("unknown format '" + format + "'", lineno);
  if (field != "real" && field != "integer" && field != "double" && field != "pattern")
    throw ParseError("unsupported field '" + field + "'", lineno);
  if (field == "pattern" && format == "array") throw ParseError("pattern field requires coordinate format", lineno);
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
  const bool symmetric = symmetry != "general";

  // Size line.
  std::vector<std::string_view> toks;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    toks = split_ws(line);
    break;
  }
  if (toks.empty()) throw ParseError("missing size line", lineno);

  if (format == "coordinate") {
    if (toks.size() != 3) throw ParseError("coordinate size line needs 'rows cols entries'", lineno);
    const Index rows = parse_index(toks[0], lineno);
    const Index cols = parse_index(toks[1], lineno);
    const Index entries = parse_index(toks[2], lineno);
    if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", lineno);
    std::vector<Triplet> trips;
    trips.reserve(symmetric ? 2 * entries : entries);
    Index seen = 0;
    while (seen < entries && std::getline(in, line)) {
      ++lineno;
      if (blank_or_comment(line)) continue;
      const auto t = split_ws(line);
      const std::size_t want = field == "pattern" ? 2 : 3;
      if (t.size() != want) throw ParseError("expected " + std::to_string(want) + " fields", lineno);
      const Index i = parse_index(t[0], lineno);
      const Index j = parse_index(t[1], lineno);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("entry index out of range", lineno);
      const double v = field == "pattern" ? 1.0 : parse_double(t[2], lineno);
      trips.push_back({i - 1, j - 1, v});
      if (symmetric && i != j) trips.push_back({j - 1, i - 1, mirror * v});
      ++seen;
    }
    if (seen != entries)
      throw ParseError("expected " + std::to_string(entries) + " entries, found " + std::to_string(seen), lineno);
    reject_trailing(in, lineno);
    return SparseMatrix::from_triplets(rows, cols, std::move(trips));
  }

  if (toks.size() != 2) throw ParseError("array size line needs 'rows cols'", lineno);
  const Index rows = parse_index(toks[0], lineno);
  const Index cols = parse_index(toks[1], lineno);
  if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", lineno);
  DenseMatrix m(rows, cols);
  // Column-major; symmetric files list the lower triangle only.
  std::vector<std::pair<Index, Index>> order;
  for (Index j = 0; j < cols; ++j) {
    const Index start = symmetric ? (symmetry == "skew-symmetric" ? j + 1 : j) : 0;
    for (Index i = start; i < rows; ++i) order.emplace_back(i, j);
  }
  std::size_t pos = 0;
  while (pos < order.size() && std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    for (const auto tok : split_ws(line)) {
      if (pos == order.size()) throw ParseError("too many values", lineno);
      const auto [i, j] = order[pos++];
      const double v = parse_double(tok, lineno);
      m(i, j) = v;
      if (symmetric && i != j) m(j, i) = mirror * v;
    }
  }
  if (pos != order.size())
    throw ParseError("expected " + std::to_string(order.size()) + " values, found " + std::to_string(pos), lineno);
  reject_trailing(in, lineno);
  return m;
}

AnyMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p)
      out << (i + 1) << ' ' << (cols[p] + 1) << ' ' << format_double(vals[p]) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const AnyMatrix& m) {
  auto out = open_out(path);
  std::visit([&](const auto& x) { write_matrix_market(out, x); }, m);
}

DenseMatrix read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> head;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    head = split_csv(line);
    break;
  }
  if (head.size() != 2) throw ParseError("CSV header must be 'rows,cols'", lineno);
  const Index rows = parse_index(head[0], lineno);
  const Index cols = parse_index(head[1], lineno);
  std::vector<double> data;
  data.reserve(rows * cols);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    for (const auto tok : split_csv(line)) {
      if (data.size() == rows * cols) throw ParseError("too many values", lineno);
      data.push_back(parse_double(tok, lineno));
    }
  }
  if (data.size() != rows * cols)
    throw ParseError("expected " + std::to_string(rows * cols) + " values, found " + std::to_string(data.size()),
                     lineno);
  return DenseMatrix(rows, cols, std::move(data));
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

AnyMatrix read_matrix(const std::filesystem::path& path) {
  if (lower(path.extension().string()) == ".csv") {
    auto in = open_in(path);
    return read_csv(in);
  }
  return read_matrix_market(path);
}

void write_matrix(const std::filesystem::path& path, const AnyMatrix& m) {
  if (lower(path.extension().string()) == ".csv") {
    const auto* dense = std::get_if<DenseMatrix>(&m);
    if (!dense) throw InvalidArgument("CSV output supports dense matrices only");
    auto out = open_out(path);
    write_csv(out, *dense);
    return;
  }
  write_matrix_market(path, m);
}

DenseTensor read_tensor(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty tensor file", 1);
  json h;
  try {
    h = json::parse(header);
  } catch (const json::exception& e) {
    throw ParseError(std::string("tensor header is not valid JSON: ") + e.what(), 1);
  }
  if (!h.contains("shape") || !h["shape"].is_array()) throw ParseError("tensor header lacks 'shape'", 1);
  std::vector<Index> shape;
  for (const auto& v : h["shape"]) {
    if (!v.is_number_unsigned() || v.get<Index>() == 0) throw ParseError("tensor shape entries must be positive", 1);
    shape.push_back(v.get<Index>());
  }
  if (shape.empty() || shape.size() > kMaxTensorOrder) throw ParseError("tensor order must be 1..6", 1);
  const std::string encoding = h.value("encoding", std::string("csv"));
  Index total = 1;
  for (Index n : shape) total *= n;
  std::vector<double> data;
  data.reserve(total);

  if (encoding == "f64le") {
    std::vector<char> raw(total * sizeof(double));
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw ParseError("truncated binary tensor payload", 2);
    for (Index i = 0; i < total; ++i) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(raw[i * 8 + static_cast<Index>(b)]);
      const double v = std::bit_cast<double>(bits);
      if (!std::isfinite(v)) throw ParseError("non-finite tensor value", 2);
      data.push_back(v);
    }
  } else if (encoding == "csv") {
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      for (char& c : line)
        if (c == ',') c = ' ';
      for (const auto tok : split_ws(line)) {
        if (data.size() == total) throw ParseError("too many tensor values", lineno);
        data.push_back(parse_double(tok, lineno));
      }
    }
    if (data.size() != total)
      throw ParseError("expected " + std::to_string(total) + " tensor values, found " + std::to_string(data.size()),
                       lineno);
  } else {
    throw ParseError("unknown tensor encoding '" + encoding + "'", 1);
  }
  return DenseTensor(std::move(shape), std::move(data));
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_tensor(in);
}

void write_tensor(std::ostream& out, const DenseTensor& t, std::string_view encoding) {
  json h;
  h["shape"] = std::vector<Index>(t.shape().begin(), t.shape().end());
  h["encoding"] = std::string(encoding);
  out << h.dump() << '\n';
  const auto data = t.data();
  if (encoding == "f64le") {
    for (double v : data) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        out.put(static_cast<char>(bits & 0xFF));
        bits >>= 8;
      }
    }
    return;
  }
  if (encoding != "csv") throw InvalidArgument("unknown tensor encoding '" + std::string(encoding) + "'");
  const Index last = t.shape().back();
  for (Index i = 0; i < data.size(); ++i) {
    out << format_double(data[i]) << ((i + 1) % last == 0 ? '\n' : ',');
  }
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t, std::string_view encoding) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_tensor(out, t, encoding);
}

std::string factorization_meta_json(const Factorization& f, std::optional<double> residual,
                                    std::string_view timestamp) {
  json j;
  j["schema"] = "pdq-report/1";
  j["kind"] = "factorization";
  j["rows"] = f.p.rows();
  j["cols"] = f.q.cols();
  j["rank"] = f.rank();
  j["converged"] = f.converged;
  j["stalled"] = f.stalled;
  j["sweeps_used"] = f.sweeps_used;
  j["best_restart"] = f.best_restart;
  j["final_objective"] = f.final_objective();
  j["objective_history"] = f.objective_history;
  if (residual) j["residual"] = *residual;
  j["config"] = {
      {"rank", f.config.rank},
      {"tol", f.config.tol},
      {"max_sweeps", f.config.max_sweeps},
      {"seed", f.config.seed},
      {"init", std::string(to_string(f.config.init))},
      {"orthonormalize", f.config.orthonormalize},
      {"symmetric", f.config.symmetric},
      {"restarts", f.config.restarts},
  };
  j["reg"] = {
      {"kind", std::string(to_string(f.reg.kind))},
      {"lambda", f.reg.lambda},
      {"mu", f.reg.mu},
      {"nu", f.reg.nu},
  };
  std::vector<std::uint64_t> flops;
  for (const auto& s : f.sweep_flops) flops.push_back(s.total());
  j["sweep_flops"] = flops;
  j["timestamp"] = std::string(timestamp);
  return j.dump(2) + "\n";
}

void save_factorization(const std::filesystem::path& dir, const Factorization& f,
                        std::optional<double> residual, std::string_view timestamp) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "P.mtx", AnyMatrix(f.p));
  write_matrix_market(dir / "D.mtx", AnyMatrix(f.d));
  write_matrix_market(dir / "Q.mtx", AnyMatrix(f.q));
  auto out = open_out(dir / "meta.json");
  out << factorization_meta_json(f, residual, timestamp);
}

}  // namespace pdq::io
