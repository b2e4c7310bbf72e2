#pragma once

#include <stdexcept>
#include <string>

namespace fracscape {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments that do not conform to the documented preconditions
/// (grid mismatch, wrong lengths, non-unit directions, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter outside its mathematical domain (order not in (0,2], k = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Model or run configuration that cannot be evaluated as given.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested quantity is not defined for this model (e.g. energy of a fractional model).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, std::size_t column) : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for the dense algorithms.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracscape
