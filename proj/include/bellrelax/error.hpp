#pragma once

#include <stdexcept>
#include <string>

namespace bellrelax {

/// Base for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in the CLI's error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }
  virtual int exit_code() const noexcept = 0;

 private:
  std::string kind_;
};

/// Bad configuration values or malformed input files (exit code 2).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string kind = "validation")
      : Error(std::move(kind), message) {}
  int exit_code() const noexcept override { return 2; }
};

/// A numerical invariant was violated: corrupted accumulation, eigensolver
/// failure, lost stochasticity (exit code 3).
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message, std::string kind = "integrity")
      : Error(std::move(kind), message) {}
  int exit_code() const noexcept override { return 3; }
};

}  // namespace bellrelax
