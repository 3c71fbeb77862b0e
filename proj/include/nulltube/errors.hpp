#pragma once

#include <stdexcept>
#include <string>

namespace nulltube {

/// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  config,        // bad user input: unknown chart, bad parameter, malformed file
  domain,        // point or surface outside where an operation is defined
  solver,        // root finding / reparametrization failed
  verification,  // a checked invariant does not hold
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

/// Malformed or physically invalid chart / surface file.
class LoadError : public Error {
 public:
  explicit LoadError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

/// Finite-difference stencil does not fit inside the chart domain.
class StencilError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateMetricError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// |det B| too small: the graph map is not an immersion in this chart.
class DegenerateGraphError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Induced metric of a surface is not positive definite.
class NotSpacelikeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Discriminant of the null-normal quadratic is not positive.
class FrameDegeneracyError : public DomainError {
 public:
  using DomainError::DomainError;
};

class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A MetricSample violates its own invariants (asymmetric or indefinite gamma,
/// non-positive Omega).
class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::verification, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorKind::solver, what) {}
};

class NotReparametrizableError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace nulltube
