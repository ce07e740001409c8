#pragma once

#include <span>
#include <string>

namespace kac {

/// Least-squares fit of log(y) = intercept + slope * log(x).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  ///< zero for exactly two points
  bool valid = false;
  std::string diagnostic;  ///< why the fit was rejected, empty when valid
};

/// Rejects fits with fewer than two points, no x-variation, or nonpositive
/// values (log undefined).
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> xs);

}  // namespace kac
