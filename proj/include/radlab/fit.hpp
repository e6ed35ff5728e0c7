#pragma once

#include <cstddef>
#include <span>

namespace radlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t count = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Least squares of log y against log x over the entries with y > 0.
LinearFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace radlab
