#pragma once

#include <stdexcept>
#include <string>

namespace paramkl
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error
{
 public:
  using Error::Error;
};

/// A value violates a documented precondition (non-finite entry, bad weight, index out of range).
class InvalidArgument : public Error
{
 public:
  using Error::Error;
};

/// A parameter-side function is not in the range of the associated map.
class NotInRangeError : public Error
{
 public:
  using Error::Error;
};

/// A matrix or kernel expected to be positive (semi-)definite is not.
class NotPositiveDefiniteError : public Error
{
 public:
  using Error::Error;
};

/// Two factors do not factor the same correlation.
class CorrelationMismatchError : public Error
{
 public:
  CorrelationMismatchError(const std::string& what, double discrepancy)
      : Error(what), discrepancy_(discrepancy)
  {
  }

  /// Relative Frobenius discrepancy between the two correlations.
  double discrepancy() const noexcept { return discrepancy_; }

 private:
  double discrepancy_;
};

/// Malformed file, manifest or schema.
class FormatError : public Error
{
 public:
  using Error::Error;
};

/// Manifest content hash does not match the referenced files.
class HashMismatchError : public FormatError
{
 public:
  using FormatError::FormatError;
};

}  // namespace paramkl
