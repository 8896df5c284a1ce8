#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vdpf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a numeric routine (negative range, delta outside (0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A probability row that does not sum to one (or has entries outside [0,1]).
class StochasticityError : public Error {
 public:
  StochasticityError(const std::string& row, double sum)
      : Error("row " + row + " is not a distribution (sum = " + std::to_string(sum) + ")"),
        row_(row),
        sum_(sum) {}

  const std::string& row() const noexcept { return row_; }
  double sum() const noexcept { return sum_; }

 private:
  std::string row_;
  double sum_;
};

// Conditioning on an observation that has zero probability.
class ImpossibleEvidence : public Error {
 public:
  using Error::Error;
};

// Every particle produced by a sequential importance sampling step got weight zero.
class ParticleDepletion : public ImpossibleEvidence {
 public:
  using ImpossibleEvidence::ImpossibleEvidence;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vdpf
