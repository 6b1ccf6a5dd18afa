#include "bellrelax/linear_fit.hpp"

#include "bellrelax/error.hpp"

#include <gsl/gsl_fit.h>

#include <cmath>
#include <vector>

namespace bellrelax {

namespace {

void check_sizes(std::size_t nx, std::size_t ny) {
  if (nx != ny) throw ValidationError("fit abscissa and ordinate lengths differ");
  if (nx < 3) throw ValidationError("linear fit needs at least three points");
}

double coefficient_of_determination(std::span<const double> x, std::span<const double> y,
                                    const std::vector<double>& w, double c0, double c1) {
  double wsum = 0.0, wy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    wsum += w[i];
    wy += w[i] * y[i];
  }
  const double mean = wy / wsum;
  double residual = 0.0, total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - (c0 + c1 * x[i]);
    residual += w[i] * r * r;
    total += w[i] * (y[i] - mean) * (y[i] - mean);
  }
  if (total <= 0.0) return residual <= 0.0 ? 1.0 : 0.0;
  return 1.0 - residual / total;
}

}  // namespace

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  LinearFit fit;
  double cov00, cov01, cov11, sumsq;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &fit.intercept, &fit.slope, &cov00, &cov01,
                 &cov11, &sumsq);
  fit.intercept_stderr = std::sqrt(cov00);
  fit.slope_stderr = std::sqrt(cov11);
  fit.r2 = coefficient_of_determination(x, y, std::vector<double>(x.size(), 1.0), fit.intercept,
                                        fit.slope);
  fit.points = x.size();
  return fit;
}

LinearFit weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> sigma) {
  check_sizes(x.size(), y.size());
  if (sigma.size() != x.size()) throw ValidationError("fit sigma length differs");
  std::vector<double> w(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
      throw ValidationError("weighted fit needs positive finite sigmas");
    w[i] = 1.0 / (sigma[i] * sigma[i]);
  }
  LinearFit fit;
  double cov00, cov01, cov11, chisq;
  gsl_fit_wlinear(x.data(), 1, w.data(), 1, y.data(), 1, x.size(), &fit.intercept, &fit.slope,
                  &cov00, &cov01, &cov11, &chisq);
  const double scale = chisq / static_cast<double>(x.size() - 2);
  fit.intercept_stderr = std::sqrt(cov00 * scale);
  fit.slope_stderr = std::sqrt(cov11 * scale);
  fit.r2 = coefficient_of_determination(x, y, w, fit.intercept, fit.slope);
  fit.points = x.size();
  return fit;
}

}  // namespace bellrelax
