#pragma once

#include <stdexcept>
#include <string>

namespace lifshitz {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid input: bad parameter values, unknown material names, malformed
// configuration or database files.
struct ConfigError : Error {
  using Error::Error;
};

// A numerical procedure failed to reach its requested accuracy. Carries the
// error actually achieved so callers can decide whether to retry or relax.
struct NumericalError : Error {
  NumericalError(const std::string& what, double achieved)
      : Error(what), achieved_error(achieved) {}
  double achieved_error = 0.0;
};

// Filesystem / stream failures.
struct IoError : Error {
  using Error::Error;
};

}  // namespace lifshitz
