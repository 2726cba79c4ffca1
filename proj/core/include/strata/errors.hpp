#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace strata {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated construction invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Estimation failures caused by a degenerate finite sample. The Monte Carlo
/// layer catches this family to implement the discard-and-count policy.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// A group mean was requested for an empty group.
class EmptyGroupError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// A group covariance (or Wald statistic) was requested with fewer than two
/// observations in some group.
class InsufficientGroupSizeError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// The pooled Wald matrix failed the positive-definiteness check.
class SingularCovarianceError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// Config-file parse or validation failure. `line` is 1-based; 0 means the
/// diagnostic is not anchored to a specific line.
class ConfigError : public Error {
 public:
  ConfigError(std::string message, std::int64_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_ = 0;
};

}  // namespace strata
