#include "crwvar/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "crwvar/errors.hpp"
#include "crwvar/estimation.hpp"

namespace crwvar {

namespace {

constexpr double kSeriesTolerance = 1e-10;
constexpr double kSignificance = 0.05;

}  // namespace

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // P[K <= l] = sqrt(2 pi)/l * sum_k exp(-(2k-1)^2 pi^2 / (8 l^2)); converges fast for small l.
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double j = 2.0 * k - 1.0;
      const double term = std::exp(c * j * j);
      cdf += term;
      if (term < kSeriesTolerance) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    if (term < kSeriesTolerance) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("Kolmogorov-Smirnov test needs two nonempty samples");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const auto na = static_cast<double>(xs.size());
  const auto nb = static_cast<double>(ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n_a = xs.size();
  r.n_b = ys.size();
  const double n_eff = na * nb / (na + nb);
  r.p_value = d == 0.0 ? 1.0 : kolmogorov_survival(std::sqrt(n_eff) * d);
  return r;
}

KsResult symmetry_test(std::span<const double> prices, Scale scale) {
  std::vector<double> up;
  std::vector<double> down;
  for (double inc : raw_increments(prices, scale)) {
    if (inc >= 0.0) up.push_back(inc);
    if (inc <= 0.0) down.push_back(-inc);
  }
  if (up.empty() || down.empty()) throw DataError("one-sided series");
  return ks_two_sample(up, down);
}

CorrelationResult pearson_corr_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (x.size() < 3) throw DataError("correlation test needs at least 3 pairs");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("zero variance");
  CorrelationResult out;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = n - 2.0;
  const double one_minus = 1.0 - out.r * out.r;
  if (one_minus <= 0.0) {
    out.p_value = 0.0;
    return out;
  }
  const double t = std::abs(out.r) * std::sqrt(df / one_minus);
  const boost::math::students_t dist(df);
  out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
  return out;
}

ValidationReport validate_asset(std::span<const double> prices, Scale scale) {
  ValidationReport report;
  report.symmetry = symmetry_test(prices, scale);
  const IncrementSeries inc = extract_increments(prices, scale);
  const std::vector<double> signs(inc.signs.begin(), inc.signs.end());
  report.sign_magnitude_corr = pearson_corr_test(inc.magnitudes, signs);
  report.symmetry_passed = report.symmetry.p_value >= kSignificance;
  report.correlation_passed = report.sign_magnitude_corr.p_value >= kSignificance;
  return report;
}

std::string_view to_string(FilterReason reason) noexcept {
  switch (reason) {
    case FilterReason::ok: return "ok";
    case FilterReason::low_volume: return "low_volume";
    case FilterReason::stale_prices: return "stale_prices";
    case FilterReason::duplicate_listing: return "duplicate_listing";
  }
  return "unknown";
}

double stale_fraction(std::span<const double> prices) {
  if (prices.size() < 2) return 1.0;
  std::size_t zeros = 0;
  for (std::size_t i = 1; i < prices.size(); ++i) zeros += prices[i] == prices[i - 1];
  return static_cast<double>(zeros) / static_cast<double>(prices.size() - 1);
}

std::vector<FilterDecision> filter_universe(std::span<const AssetRecord> assets,
                                            const FilterConfig& config) {
  std::vector<FilterDecision> out;
  out.reserve(assets.size());
  for (const auto& a : assets) {
    FilterDecision d{a.symbol, true, FilterReason::ok};
    if (a.volume && *a.volume < config.volume_min) {
      d = {a.symbol, false, FilterReason::low_volume};
    } else if (stale_fraction(a.prices) > config.stale_fraction_max) {
      d = {a.symbol, false, FilterReason::stale_prices};
    }
    out.push_back(d);
  }

  // Winner per listing group among the survivors.
  std::map<std::string, std::size_t> winner;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    if (!out[i].kept || assets[i].listing_group.empty()) continue;
    auto [it, inserted] = winner.try_emplace(assets[i].listing_group, i);
    if (inserted) continue;
    const auto& best = assets[it->second];
    const auto& cand = assets[i];
    if (cand.market_cap > best.market_cap ||
        (cand.market_cap == best.market_cap && cand.symbol < best.symbol)) {
      it->second = i;
    }
  }
  for (std::size_t i = 0; i < assets.size(); ++i) {
    if (!out[i].kept || assets[i].listing_group.empty()) continue;
    if (winner.at(assets[i].listing_group) != i) {
      out[i] = {assets[i].symbol, false, FilterReason::duplicate_listing};
    }
  }
  return out;
}

}  // namespace crwvar
