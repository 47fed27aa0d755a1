#pragma once

#include <span>

namespace spinmem {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Needs at least two
/// distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);

}  // namespace spinmem
