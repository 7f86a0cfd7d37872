#pragma once

#include <stdexcept>
#include <string>

namespace radscat {

// Base for every failure raised by the library. The CLI maps subclasses
// onto exit codes (configuration errors -> 2, everything else -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside its admissible range or structurally invalid input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature did not reach tolerance or the integral diverges.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Time step too large for the explicit integrator.
class CflError : public Error {
 public:
  using Error::Error;
};

// Numerical support reached the outer Dirichlet boundary.
class ContainmentError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-range run configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace radscat
