#pragma once

#include <stdexcept>
#include <string>

namespace dipspin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two spins share a position (directly or after periodic wrapping).
class CoincidentSpins : public Error {
 public:
  CoincidentSpins(std::size_t l, std::size_t k)
      : Error("coincident spins " + std::to_string(l) + " and " + std::to_string(k)),
        first(l),
        second(k) {}
  std::size_t first;
  std::size_t second;
};

/// Integration stopped because a fidelity monitor crossed its threshold.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A fit or analysis could not produce a meaningful result.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Configuration text was malformed or referenced an invalid key/value.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key(std::move(key)) {}
  std::string key;
};

}  // namespace dipspin
