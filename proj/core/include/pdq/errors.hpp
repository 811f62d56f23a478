#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdq {

/// Raised on dimension mismatches and violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative or direct kernel could not produce a usable result.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// LU met an exactly zero pivot.
class SingularMatrix : public NumericalFailure {
 public:
  explicit SingularMatrix(std::size_t pivot_column)
      : NumericalFailure("singular matrix: zero pivot in column " + std::to_string(pivot_column),
                         pivot_column),
        pivot_column_(pivot_column) {}

  std::size_t pivot_column() const noexcept { return pivot_column_; }

 private:
  std::size_t pivot_column_;
};

/// Malformed matrix/tensor file. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " at line " + std::to_string(line) : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pdq
