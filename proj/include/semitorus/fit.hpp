#pragma once

#include <cstdint>
#include <vector>

namespace semitorus {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log y against log x.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap for the log-log slope, resampling (x, y) pairs.
// Resamples with fewer than two distinct x are discarded.
Interval bootstrap_slope(const std::vector<double>& x, const std::vector<double>& y, int resamples,
                         std::uint64_t seed, double level = 0.95);

// Percentile bootstrap for the mean of a sample.
Interval bootstrap_mean(const std::vector<double>& v, int resamples, std::uint64_t seed, double level = 0.95);

}  // namespace semitorus
