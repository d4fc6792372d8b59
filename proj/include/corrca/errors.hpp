#pragma once

#include <stdexcept>
#include <string>

namespace corrca {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data: non-numeric cells, NaN/Inf values, bad manifests.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Shape disagreement between tensors, matrices or files.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (out-of-range parameter, bad descriptor string).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: matrix not positive definite, singular system.
/// The message names the remedy (typically a regularization option).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrca
