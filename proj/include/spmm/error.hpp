#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spmm {

/// Operand shapes do not agree (e.g. A.num_cols != B.num_rows).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructor or generator received arguments outside its domain.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An execution-model rule was broken: a lane group wrote outside its
/// output region, a broadcast named a lane that does not exist, or a
/// segmented reduction saw decreasing row ids.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Matrix Market input could not be parsed. line() is 1-based; 0 means the
/// failure was not tied to a particular line (e.g. truncated input).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace spmm
