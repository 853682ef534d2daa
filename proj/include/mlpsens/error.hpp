#pragma once

#include <stdexcept>
#include <string>

namespace mlpsens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value or structure violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Matrix or tensor shapes do not line up.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed document or CSV. The message carries the offending location.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Input has zero spread where a spread is required (constant column, all
/// identical KDE sample).
class DegenerateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// The requested method is not defined for this network topology.
class UnsupportedStructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlpsens
