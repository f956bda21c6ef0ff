#include "crwvar/hf_forecast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crwvar/errors.hpp"
#include "crwvar/stats.hpp"
#include "crwvar/variance_theory.hpp"

namespace crwvar {

ConditionalEmpirical::ConditionalEmpirical(std::array<std::vector<JointDraw>, 4> buckets)
    : buckets_(std::move(buckets)) {
  for (const auto& b : buckets_) {
    for (const auto& d : b) {
      if (!(d.magnitude > 0.0) || !(d.tau > 0.0) || !std::isfinite(d.magnitude) ||
          !std::isfinite(d.tau)) {
        throw std::invalid_argument("conditional empirical entries need positive magnitude and tau");
      }
    }
    pooled_.insert(pooled_.end(), b.begin(), b.end());
  }
  if (pooled_.empty()) throw std::invalid_argument("all conditional buckets are empty");
}

Moments ConditionalEmpirical::pooled_moments() const noexcept {
  double s1 = 0.0;
  double s2 = 0.0;
  for (const auto& d : pooled_) {
    s1 += d.magnitude;
    s2 += d.magnitude * d.magnitude;
  }
  const auto n = static_cast<double>(pooled_.size());
  const double m1 = s1 / n;
  return {m1, std::max(s2 / n, m1 * m1)};
}

double ConditionalEmpirical::mean_tau() const noexcept {
  double s = 0.0;
  for (const auto& d : pooled_) s += d.tau;
  return s / static_cast<double>(pooled_.size());
}

ConditionalEmpirical build_conditional_empirical(const TickSeries& ticks, Scale scale) {
  if (ticks.size() < 3) {
    throw DataError("insufficient ticks: need at least 3 events, got " + std::to_string(ticks.size()));
  }
  auto increment = [&](std::size_t i) {
    const double a = ticks[i - 1].price;
    const double b = ticks[i].price;
    return scale == Scale::log ? std::log1p((b - a) / a) : b - a;
  };
  std::array<std::vector<JointDraw>, 4> buckets;
  double prev = increment(1);
  for (std::size_t i = 2; i < ticks.size(); ++i) {
    const double cur = increment(i);
    if (cur == 0.0 || prev == 0.0) throw DataError("zero increment in tick series");
    const int s_now = cur > 0.0 ? 1 : -1;
    const int s_prev = prev > 0.0 ? 1 : -1;
    buckets[ConditionalEmpirical::index(s_now, s_prev)].push_back(
        {std::abs(cur), ticks[i].time - ticks[i - 1].time});
    prev = cur;
  }
  return ConditionalEmpirical(std::move(buckets));
}

MuTauEstimate estimate_mu_tau(const TickSeries& ticks) {
  const double span = ticks.span();
  if (!(span > 0.0)) throw DataError("event rate needs a positive observed span");
  const std::size_t renewals = ticks.size() - 1;
  return {renewals, span, static_cast<double>(renewals) / span};
}

MuTauEstimate estimate_mu_tau(const TickSeries& ticks, double window) {
  if (!(window > 0.0)) throw DataError("event rate needs a positive window");
  return {ticks.size(), window, static_cast<double>(ticks.size()) / window};
}

std::vector<double> forecast_increments(const ConditionalEmpirical& model,
                                        const SignChainParams& params, int last_sign,
                                        double horizon, std::size_t n_sims, const RngStream& rng,
                                        const ForecastOptions& options) {
  if (n_sims == 0) throw std::invalid_argument("n_sims must be >= 1");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (last_sign != 1 && last_sign != -1) throw std::invalid_argument("last sign must be +1 or -1");
  return map_replicates(
      n_sims,
      [&](std::size_t k) {
        return renewal_increment(params, model, horizon, last_sign, rng.fork(k), options.max_events)
            .increment;
      },
      options.exec);
}

ForecastDistribution forecast_distribution(const ConditionalEmpirical& model,
                                           const SignChainParams& params,
                                           const ForecastOrigin& origin, double horizon,
                                           std::size_t n_sims, const RngStream& rng,
                                           const ForecastOptions& options) {
  if (options.scale == Scale::log && !(origin.price > 0.0)) {
    throw std::invalid_argument("log-scale forecast needs a positive origin price");
  }
  ForecastDistribution out;
  out.horizon = horizon;
  out.origin = origin;
  out.samples = forecast_increments(model, params, origin.last_sign, horizon, n_sims, rng, options);
  for (double& s : out.samples) {
    s = options.scale == Scale::log ? origin.price * std::exp(s) : origin.price + s;
  }
  return out;
}

double pit(const ForecastDistribution& forecast, double realized) {
  if (forecast.samples.empty()) throw std::invalid_argument("empty forecast");
  std::size_t below = 0;
  std::size_t equal = 0;
  for (double s : forecast.samples) {
    below += s < realized;
    equal += s == realized;
  }
  return (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
         static_cast<double>(forecast.samples.size());
}

double pit_sorted(std::span<const double> sorted, double realized) {
  if (sorted.empty()) throw std::invalid_argument("empty forecast");
  const auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), realized);
  const auto below = static_cast<double>(lo - sorted.begin());
  const auto equal = static_cast<double>(hi - lo);
  return (below + 0.5 * equal) / static_cast<double>(sorted.size());
}

double randomized_pit_sorted(std::span<const double> sorted, double realized, RngStream& rng) {
  if (sorted.empty()) throw std::invalid_argument("empty forecast");
  const auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), realized);
  const auto below = static_cast<double>(lo - sorted.begin());
  const auto equal = static_cast<double>(hi - lo);
  return (below + rng.uniform() * equal) / static_cast<double>(sorted.size());
}

double ks_uniform(std::span<const double> pits) {
  if (pits.empty()) throw std::invalid_argument("no PIT values");
  std::vector<double> u(pits.begin(), pits.end());
  for (double v : u) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("PIT value outside [0, 1]");
  }
  std::sort(u.begin(), u.end());
  const auto n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto rank = static_cast<double>(i);
    d = std::max({d, (rank + 1.0) / n - u[i], u[i] - rank / n});
  }
  return d;
}

std::vector<double> forecast_origin_times(const TickSeries& test, double horizon, double stride) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (!(stride > 0.0)) throw std::invalid_argument("stride must be positive");
  if (test.empty()) return {};
  const double room = test.span() - horizon;
  if (room < 0.0) return {};
  const auto count = static_cast<std::size_t>(std::floor(room / stride)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = test.front().time + static_cast<double>(k) * stride;
  }
  return out;
}

namespace {

/// Index of the last event with time <= t; events must start at or before t.
std::size_t last_at_or_before(const TickSeries& ticks, double t) {
  const auto events = ticks.events();
  const auto it = std::upper_bound(events.begin(), events.end(), t,
                                   [](double v, const TickEvent& e) { return v < e.time; });
  return static_cast<std::size_t>(it - events.begin()) - 1;
}

struct OriginCase {
  int last_sign = 0;
  double realized_increment = 0.0;
};

}  // namespace

CalibrationCurve sweep_p(const TickSeries& train, const TickSeries& test,
                         std::span<const double> p_grid, const SweepConfig& config,
                         const RngStream& rng) {
  if (p_grid.empty()) throw std::invalid_argument("empty p grid");
  for (double p : p_grid) static_cast<void>(SignChainParams{p});
  for (std::size_t i = 1; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > p_grid[i - 1])) throw std::invalid_argument("p grid must be strictly increasing");
  }
  const ConditionalEmpirical model = build_conditional_empirical(train, config.scale);
  const std::vector<double> origins = forecast_origin_times(test, config.horizon, config.stride);
  if (origins.empty()) throw DataError("no forecast origins fit in the test span");

  CalibrationCurve curve;
  curve.origins_total = origins.size();
  curve.mu_tau = estimate_mu_tau(train).rate;
  curve.moments = model.pooled_moments();

  std::vector<OriginCase> cases;
  cases.reserve(origins.size());
  for (double t0 : origins) {
    const std::size_t i0 = last_at_or_before(test, t0);
    if (i0 == 0) {
      ++curve.origins_skipped;
      continue;
    }
    const std::size_t i1 = last_at_or_before(test, t0 + config.horizon);
    const double p0 = test[i0].price;
    const double p1 = test[i1].price;
    const int sign = test[i0].price > test[i0 - 1].price ? 1 : -1;
    const double inc = config.scale == Scale::log ? std::log1p((p1 - p0) / p0) : p1 - p0;
    cases.push_back({sign, inc});
  }
  if (cases.empty()) throw DataError("every forecast origin lacks a prior increment");

  ForecastOptions fopts = config.forecast;
  fopts.scale = config.scale;
  for (double p : p_grid) {
    const SignChainParams params(p);
    std::array<std::vector<double>, 2> sorted;
    for (int s : {-1, 1}) {
      auto& inc = sorted[s > 0 ? 1 : 0];
      inc = forecast_increments(model, params, s, config.horizon, config.n_sims,
                                rng.fork(s > 0 ? 1 : 0), fopts);
      std::sort(inc.begin(), inc.end());
    }
    std::vector<double> pits(cases.size());
    RngStream tie_rng = rng.fork(2);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& sample = sorted[cases[i].last_sign > 0 ? 1 : 0];
      pits[i] = config.pit_mode == PitMode::mid_rank
                    ? pit_sorted(sample, cases[i].realized_increment)
                    : randomized_pit_sorted(sample, cases[i].realized_increment, tie_rng);
    }
    std::vector<double> pooled = sorted[0];
    pooled.insert(pooled.end(), sorted[1].begin(), sorted[1].end());
    const double horizon_scale = config.horizon > 0.0 ? config.horizon : 1.0;

    CalibrationRow row;
    row.p = p;
    row.ks_distance = ks_uniform(pits);
    row.variance_rate =
        renewal_limiting_variance(params, curve.moments.m1, curve.moments.m2, curve.mu_tau).value;
    row.forecast_variance_rate = stats::summarize(pooled).variance / horizon_scale;
    row.n_forecasts = cases.size();
    curve.rows.push_back(row);
  }
  return curve;
}

double argmin_p(const CalibrationCurve& curve) {
  if (curve.rows.empty()) throw std::invalid_argument("empty calibration curve");
  const CalibrationRow* best = &curve.rows.front();
  for (const auto& row : curve.rows) {
    if (row.ks_distance < best->ks_distance) {
      best = &row;
    } else if (row.ks_distance == best->ks_distance) {
      const double d_row = std::abs(row.p - 0.5);
      const double d_best = std::abs(best->p - 0.5);
      if (d_row < d_best || (d_row == d_best && row.p < best->p)) best = &row;
    }
  }
  return best->p;
}

}  // namespace crwvar
