#pragma once

#include <stdexcept>
#include <string>

namespace annoloop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or unmet preconditions supplied by the caller
/// (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (maps to CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace annoloop
