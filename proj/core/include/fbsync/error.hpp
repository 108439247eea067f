#pragma once

#include <stdexcept>
#include <string>

namespace fbsync {

/// Broad failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
  config,        // invalid parameters, mismatched grids or drives
  io,            // unreadable or malformed files
  numeric_domain // well-formed input outside the solvable range
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Grids of adjacent stages in a cascade do not line up.
class CompositionError : public Error {
 public:
  explicit CompositionError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// A truncated coefficient set does not capture enough of the modulated power.
class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& what)
      : Error(ErrorKind::numeric_domain, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::numeric_domain, what) {}
};

/// Singular least-squares fits, zero-norm fidelity operands.
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorKind::numeric_domain, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class MalformedTraceError : public Error {
 public:
  explicit MalformedTraceError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace fbsync
