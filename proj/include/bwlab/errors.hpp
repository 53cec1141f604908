#pragma once

#include <stdexcept>
#include <string>

namespace bwlab {

/// Invalid model or run configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A denominator or linear system that is singular at the requested energy
/// (exit code 3). Never regularized silently.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative procedure that did not converge (exit code 4).
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double last_iterate, int iterations)
      : std::runtime_error(what), last_iterate_(last_iterate), iterations_(iterations) {}

  double last_iterate() const noexcept { return last_iterate_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_iterate_;
  int iterations_;
};

/// Threshold below which a diagonal energy denominator counts as singular.
inline constexpr double kDegenerateThreshold = 1e-10;

}  // namespace bwlab
