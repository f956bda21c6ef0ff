#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crwvar/types.hpp"

namespace crwvar {

/// Signed increments split into signs and positive magnitudes; zeros are dropped and counted.
struct IncrementSeries {
  std::vector<int> signs;
  std::vector<double> magnitudes;
  Scale scale = Scale::log;
  std::size_t dropped_zero_count = 0;

  std::size_t size() const noexcept { return signs.size(); }
  /// Fraction of raw increments that were exactly zero.
  double zero_fraction() const noexcept;
};

struct VarianceReport {
  double p_hat = 0.0;
  double m1_hat = 0.0;
  double m2_hat = 0.0;
  double sigma_bar_sq = 0.0;
  std::size_t n_increments = 0;
  std::size_t n_transitions = 0;
  std::size_t dropped_zero_count = 0;
  /// Set when more than 5% of raw increments were zero.
  bool stale_flag = false;
};

struct EstimatorOptions {
  /// Add-beta smoothing of p_hat; 0 gives the raw proportion.
  double pseudo_count = 0.0;
};

inline constexpr double kStaleZeroFraction = 0.05;

/// Raw consecutive differences: log(Z_i / Z_{i-1}) or Z_i - Z_{i-1}.
std::vector<double> raw_increments(std::span<const double> prices, Scale scale);

/// Throws DataError for fewer than two prices or a nonpositive price on the log scale.
IncrementSeries extract_increments(std::span<const double> prices, Scale scale = Scale::log);

/// Proportion of consecutive equal signs. Throws DataError ("insufficient transitions").
double estimate_p(std::span<const int> signs, const EstimatorOptions& options = {});

/// Sample mean of magnitudes and of squared magnitudes, m2 >= m1^2 enforced.
Moments estimate_moments(std::span<const double> magnitudes);

/// Full per-asset pipeline. Throws DegenerateError when p_hat is 0 or 1 or m2_hat is 0.
VarianceReport analyze_asset(std::span<const double> prices, Scale scale = Scale::log,
                             const EstimatorOptions& options = {});

}  // namespace crwvar
