#pragma once

#include <span>

namespace bwlab {

/// Least-squares line through (log x, log |y|).
struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Requires at least two points with x > 0 and y != 0.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace bwlab
