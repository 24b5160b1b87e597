#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rowaction {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a precondition (dimension mismatch, bad index, bad config).
class ContractError : public Error {
 public:
  using Error::Error;
};

// A Gram-matrix factorization hit a pivot below the rank tolerance.
class RankError : public Error {
 public:
  using Error::Error;
};

// An iterative numerical kernel failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(std::size_t row)
      : Error("row " + std::to_string(row) + " has (near) zero norm"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rowaction
