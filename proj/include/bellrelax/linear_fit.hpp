#pragma once

#include <cstddef>
#include <span>

namespace bellrelax {

/// y = intercept + slope * x with standard errors.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_stderr = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares; standard errors from the residual variance.
/// Needs at least three points.
LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with weights 1/sigma^2. The covariance is scaled
/// by the reduced chi^2, so only the relative sizes of sigma matter.
LinearFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> sigma);

}  // namespace bellrelax
