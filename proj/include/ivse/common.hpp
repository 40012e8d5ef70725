#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace ivse {

inline constexpr double kPi = std::numbers::pi;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration or violated geometric precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A support region came out empty; quantities built on it are undefined.
class EmptyRegionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Kernel evaluated at coincident points without regularization.
class SingularEvaluationError : public Error {
 public:
  using Error::Error;
};

/// Non-finite integrand value at a quadrature node.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  [[nodiscard]] std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Internal consistency check failed (e.g. a quantity that must be positive is not).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The evolving field is about to overflow; the run should stop cleanly.
class BlowupImminent : public Error {
 public:
  using Error::Error;
};

/// Sum with a fixed binary-tree topology. The result depends only on the
/// input order, never on how callers are scheduled.
double pairwise_sum(std::span<const double> values);

/// Number of worker threads the library will use (IVSE_THREADS or OpenMP default).
int worker_threads();

/// Apply IVSE_THREADS if set. Called by the CLI before any parallel region.
void configure_threads_from_env();

}  // namespace ivse
