#pragma once

#include <stdexcept>
#include <string>

namespace gcr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Index ranges or grids of two operands disagree.
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Derivative requested along a non-periodic axis.
class UnsupportedBoundary : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A computation failed numerically (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcr
