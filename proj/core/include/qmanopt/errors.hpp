#pragma once

#include <stdexcept>
#include <string>

namespace qmanopt {

/// Input fails a mathematical constraint (orthonormality, symmetry, ...).
class ConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (lost orthogonality, eigensolver stall, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_ = 0;
};

/// Invalid run configuration; message lists every violation found.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimizer stalled before reaching its convergence target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmanopt
