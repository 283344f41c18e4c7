#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlab {

enum class ErrorKind {
  NonPositiveLog,
  DivisionByZero,
  DimensionMismatch,
  EmptyRemainder,
  IndexOutOfRange,
  ZeroPotential,
  InsufficientData,
  EmptyStagnatingSet,
  TauOutOfRange,
  HorizonTooShort,
  DomainError,
  EmptyCohort,
  CorruptLog,
  VersionMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when Phi(t, d) is exactly zero in at least one dimension.
class ZeroPotentialError : public Error {
 public:
  explicit ZeroPotentialError(std::vector<int> dims);
  const std::vector<int>& dims() const noexcept { return dims_; }

 private:
  std::vector<int> dims_;
};

}  // namespace swarmlab
