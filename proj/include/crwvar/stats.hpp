#pragma once

#include <span>
#include <vector>

namespace crwvar::stats {

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1)
  std::size_t n = 0;
};

/// Two-pass mean and unbiased variance; variance is 0 for n < 2.
Summary summarize(std::span<const double> xs);

/// Standard error of the unbiased sample variance, sqrt((m4 - s^4 (n-3)/(n-1)) / n).
double variance_standard_error(std::span<const double> xs);

/// Linear-interpolation quantile (R type 7) of an unsorted sample; q in [0, 1].
double quantile(std::vector<double> xs, double q);

}  // namespace crwvar::stats
