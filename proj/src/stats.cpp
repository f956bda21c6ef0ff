#include "crwvar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crwvar::stats {

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / static_cast<double>(s.n - 1);
  return s;
}

double variance_standard_error(std::span<const double> xs) {
  const auto s = summarize(xs);
  if (s.n < 4) return INFINITY;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    m4 += d * d * d * d;
  }
  const auto n = static_cast<double>(s.n);
  m4 /= n;
  const double var4 = s.variance * s.variance;
  return std::sqrt(std::max(0.0, (m4 - var4 * (n - 3.0) / (n - 1.0)) / n));
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace crwvar::stats
