#pragma once

#include <stdexcept>
#include <string>

namespace hpss {

// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent inputs (wrong strategy length, empty vectors, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (budget below initialization cost, bad flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Correlation is undefined (constant vector); caller decides the policy.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

// No rating pattern found in a judge response.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Rating pattern found but the value is outside the scoring scale.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A required auxiliary artifact (reference/autocot/metrics) is missing.
class DependencyError : public Error {
 public:
  using Error::Error;
};

// Replay backend was asked for a strategy absent from its journal.
class CacheMissError : public Error {
 public:
  using Error::Error;
};

// Judge endpoint unreachable after retries, or storage failure. A run that
// hits this suspends with a resumable journal.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Journal contents disagree with the deterministic re-execution of the run.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& msg, std::size_t line)
      : Error("journal line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hpss
