#pragma once

#include <stdexcept>
#include <string>

namespace rcs {

// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A counting interval or pattern reaches outside the simulated window.
class WindowError : public Error {
 public:
  using Error::Error;
};

// Invalid law, model, or process parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Arrival generation exceeded the configured cap.
class RunawayError : public Error {
 public:
  using Error::Error;
};

// A closed-form accessor is not available for this model.
class AccessorUnavailable : public Error {
 public:
  using Error::Error;
};

// Configuration text could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcs
