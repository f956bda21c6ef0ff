#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crwvar/types.hpp"

namespace crwvar {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;
};

struct ValidationReport {
  KsResult symmetry;
  CorrelationResult sign_magnitude_corr;
  bool symmetry_passed = false;     // symmetry.p_value >= 0.05
  bool correlation_passed = false;  // sign_magnitude_corr.p_value >= 0.05
};

/// Survival function of the limiting Kolmogorov distribution, P[K > lambda].
double kolmogorov_survival(double lambda);

/**
 * Two-sample Kolmogorov-Smirnov test. The statistic is the exact sup distance
 * between the two ECDFs; the p-value is asymptotic, evaluated at
 * sqrt(n_a n_b / (n_a + n_b)) * D, and is inaccurate below an effective size of ~25.
 */
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/**
 * Compares non-negative increments against the magnitudes of non-positive ones.
 * Zero increments belong to both samples. Throws DataError ("one-sided series").
 */
KsResult symmetry_test(std::span<const double> prices, Scale scale = Scale::log);

/// Pearson r with a two-sided p-value from Student's t on n - 2 degrees of freedom.
CorrelationResult pearson_corr_test(std::span<const double> x, std::span<const double> y);

/// Both model checks on one price series; correlation uses the nonzero increments.
ValidationReport validate_asset(std::span<const double> prices, Scale scale = Scale::log);

// ---------------------------------------------------------------------------
// Universe filtering

enum class FilterReason { ok, low_volume, stale_prices, duplicate_listing };

std::string_view to_string(FilterReason reason) noexcept;

struct AssetRecord {
  std::string symbol;
  /// Unknown volume skips the volume check.
  std::optional<double> volume;
  std::vector<double> prices;
  /// Assets sharing a non-empty group are alternative listings of one issuer.
  std::string listing_group;
  double market_cap = 0.0;
};

struct FilterDecision {
  std::string symbol;
  bool kept = false;
  FilterReason reason = FilterReason::ok;
};

struct FilterConfig {
  double volume_min = 100'000;
  double stale_fraction_max = 0.05;
};

/// Zero-increment fraction of a price series; 1 for fewer than two prices.
double stale_fraction(std::span<const double> prices);

/**
 * One decision per asset, in input order. Checks apply in order: volume, stale
 * prices, then duplicate listings among the survivors, keeping the largest
 * market cap per group (ties to the lexicographically smallest symbol).
 */
std::vector<FilterDecision> filter_universe(std::span<const AssetRecord> assets,
                                            const FilterConfig& config = {});

}  // namespace crwvar
