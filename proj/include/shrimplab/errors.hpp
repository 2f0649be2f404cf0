#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace shrimplab {

/// Base for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A solver failed to converge or an orbit left the finite domain.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Iteration escaped the finite domain; `stage` names where it happened.
class EscapeError : public NumericalError {
 public:
  EscapeError(const std::string& what, int stage) : NumericalError(what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration; carries the offending key and source line (0 if none).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : Error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace shrimplab
