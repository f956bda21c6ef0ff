#include "crwvar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crwvar/errors.hpp"
#include "crwvar/variance_theory.hpp"

namespace crwvar {

double IncrementSeries::zero_fraction() const noexcept {
  const std::size_t total = signs.size() + dropped_zero_count;
  return total == 0 ? 0.0 : static_cast<double>(dropped_zero_count) / static_cast<double>(total);
}

std::vector<double> raw_increments(std::span<const double> prices, Scale scale) {
  if (prices.size() < 2) throw DataError("need at least 2 prices, got " + std::to_string(prices.size()));
  if (scale == Scale::log) {
    for (std::size_t i = 0; i < prices.size(); ++i) {
      if (!(prices[i] > 0.0)) {
        throw DataError("nonpositive price at index " + std::to_string(i) + " on log scale");
      }
    }
  }
  std::vector<double> out(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) {
    // log1p of the relative change is zero exactly when the prices are equal.
    const double diff = prices[i] - prices[i - 1];
    out[i - 1] = scale == Scale::log ? std::log1p(diff / prices[i - 1]) : diff;
  }
  return out;
}

IncrementSeries extract_increments(std::span<const double> prices, Scale scale) {
  IncrementSeries series;
  series.scale = scale;
  for (double inc : raw_increments(prices, scale)) {
    if (inc == 0.0) {
      ++series.dropped_zero_count;
      continue;
    }
    series.signs.push_back(inc > 0.0 ? 1 : -1);
    series.magnitudes.push_back(std::abs(inc));
  }
  return series;
}

double estimate_p(std::span<const int> signs, const EstimatorOptions& options) {
  if (signs.size() < 2) throw DataError("insufficient transitions");
  std::size_t same = 0;
  for (std::size_t i = 1; i < signs.size(); ++i) same += signs[i] == signs[i - 1];
  const auto transitions = static_cast<double>(signs.size() - 1);
  const double beta = options.pseudo_count;
  return (static_cast<double>(same) + beta) / (transitions + 2.0 * beta);
}

Moments estimate_moments(std::span<const double> magnitudes) {
  if (magnitudes.empty()) throw DataError("no magnitudes to average");
  double s1 = 0.0;
  double s2 = 0.0;
  for (double d : magnitudes) {
    s1 += d;
    s2 += d * d;
  }
  const auto n = static_cast<double>(magnitudes.size());
  const double m1 = s1 / n;
  return {m1, std::max(s2 / n, m1 * m1)};
}

VarianceReport analyze_asset(std::span<const double> prices, Scale scale,
                             const EstimatorOptions& options) {
  const IncrementSeries inc = extract_increments(prices, scale);
  if (inc.size() < 2) {
    throw DataError("need at least 2 nonzero increments, got " + std::to_string(inc.size()));
  }
  VarianceReport r;
  r.p_hat = estimate_p(inc.signs, options);
  const Moments m = estimate_moments(inc.magnitudes);
  r.m1_hat = m.m1;
  r.m2_hat = m.m2;
  r.n_increments = inc.size();
  r.n_transitions = inc.size() - 1;
  r.dropped_zero_count = inc.dropped_zero_count;
  r.stale_flag = inc.zero_fraction() > kStaleZeroFraction;
  if (r.p_hat <= 0.0 || r.p_hat >= 1.0) throw DegenerateError("degenerate persistence");
  if (r.m2_hat == 0.0) throw DegenerateError("degenerate magnitudes");
  r.sigma_bar_sq = variance_ratio(SignChainParams(r.p_hat), r.m1_hat, r.m2_hat);
  return r;
}

}  // namespace crwvar
