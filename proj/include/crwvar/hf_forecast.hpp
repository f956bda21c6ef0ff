#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "crwvar/parallel.hpp"
#include "crwvar/rng.hpp"
#include "crwvar/simulate.hpp"
#include "crwvar/types.hpp"

namespace crwvar {

/**
 * Empirical joint law of (|increment|, inter-event time) conditioned on the signs
 * of the current and previous increments. Immutable after construction and safe
 * to share across threads.
 *
 * A draw from an empty bucket falls back to the pooled sample; has_fallback()
 * reports which buckets do so.
 */
class ConditionalEmpirical {
 public:
  /// Throws std::invalid_argument if all buckets are empty or any entry is not positive.
  explicit ConditionalEmpirical(std::array<std::vector<JointDraw>, 4> buckets);

  static constexpr std::size_t index(int s_now, int s_prev) noexcept {
    return (s_now > 0 ? 2U : 0U) + (s_prev > 0 ? 1U : 0U);
  }

  std::span<const JointDraw> bucket(int s_now, int s_prev) const noexcept {
    return buckets_[index(s_now, s_prev)];
  }
  std::span<const JointDraw> pooled() const noexcept { return pooled_; }
  bool has_fallback(int s_now, int s_prev) const noexcept { return bucket(s_now, s_prev).empty(); }

  JointDraw draw(int s_now, int s_prev, RngStream& rng) const noexcept {
    const auto& b = buckets_[index(s_now, s_prev)];
    const auto& src = b.empty() ? pooled_ : b;
    return src[rng.below(src.size())];
  }

  /// Moments of the pooled magnitudes.
  Moments pooled_moments() const noexcept;
  double mean_tau() const noexcept;

 private:
  std::array<std::vector<JointDraw>, 4> buckets_;
  std::vector<JointDraw> pooled_;
};

/// Buckets consecutive increment pairs of a tick series. Throws DataError ("insufficient ticks").
ConditionalEmpirical build_conditional_empirical(const TickSeries& ticks, Scale scale = Scale::log);

struct MuTauEstimate {
  std::size_t events = 0;
  double span = 0.0;
  double rate = 0.0;
};

/**
 * Event rate. Without a window the observed span back - front is used and the
 * events are the size() - 1 renewals inside it; with a window, every event
 * counts. Throws DataError for a zero span.
 */
MuTauEstimate estimate_mu_tau(const TickSeries& ticks);
MuTauEstimate estimate_mu_tau(const TickSeries& ticks, double window);

struct ForecastOrigin {
  double time = 0.0;
  double price = 1.0;
  int last_sign = 1;
};

struct ForecastDistribution {
  std::vector<double> samples;  // terminal prices, one per replicate
  double horizon = 0.0;
  ForecastOrigin origin;
};

struct ForecastOptions {
  Scale scale = Scale::log;
  std::size_t max_events = kDefaultMaxEvents;
  Exec exec = Exec::parallel;
};

/// Net increments over `horizon` for n_sims replicates; replicate k draws from rng.fork(k).
std::vector<double> forecast_increments(const ConditionalEmpirical& model,
                                        const SignChainParams& params, int last_sign,
                                        double horizon, std::size_t n_sims, const RngStream& rng,
                                        const ForecastOptions& options = {});

/// Terminal price distribution from an origin state; same replicate streams as forecast_increments.
ForecastDistribution forecast_distribution(const ConditionalEmpirical& model,
                                           const SignChainParams& params,
                                           const ForecastOrigin& origin, double horizon,
                                           std::size_t n_sims, const RngStream& rng,
                                           const ForecastOptions& options = {});

/// Mid-rank ECDF value (#below + #equal / 2) / n.
double pit(const ForecastDistribution& forecast, double realized);
/// As pit() on an ascending sample, in O(log n).
double pit_sorted(std::span<const double> sorted, double realized);
/// (#below + U * #equal) / n with U uniform; uniform on [0, 1] under calibration.
double randomized_pit_sorted(std::span<const double> sorted, double realized, RngStream& rng);

/// Sup distance between the ECDF of `pits` and the Uniform(0, 1) CDF.
double ks_uniform(std::span<const double> pits);

enum class PitMode { mid_rank, randomized };

struct SweepConfig {
  double horizon = 300.0;
  double stride = 300.0;
  std::size_t n_sims = 100'000;
  Scale scale = Scale::log;
  PitMode pit_mode = PitMode::mid_rank;
  ForecastOptions forecast{};
};

struct CalibrationRow {
  double p = 0.0;
  double ks_distance = 0.0;
  /// Limiting variance rate mu_tau * (m2 + m1^2 (2p-1)/(1-p)) from the training fit.
  double variance_rate = 0.0;
  /// Simulated variance of the forecast increment per unit horizon, pooled over both last signs.
  double forecast_variance_rate = 0.0;
  std::size_t n_forecasts = 0;
};

struct CalibrationCurve {
  std::vector<CalibrationRow> rows;
  std::size_t origins_total = 0;
  std::size_t origins_skipped = 0;
  double mu_tau = 0.0;
  Moments moments;
};

/// Origin times front().time + k * stride for k = 0 .. floor((span - horizon) / stride).
std::vector<double> forecast_origin_times(const TickSeries& test, double horizon, double stride);

/**
 * Fits the conditional model on `train`, forecasts `test` from every origin for
 * each p in the grid, and scores the PITs against uniformity.
 *
 * The forecast law of the increment depends on the origin only through the last
 * sign, so each grid point simulates one increment sample per sign and shares
 * it across origins. The same replicate streams are reused for every p.
 * Origins without two prior events (no last sign) are skipped and counted.
 */
CalibrationCurve sweep_p(const TickSeries& train, const TickSeries& test,
                         std::span<const double> p_grid, const SweepConfig& config,
                         const RngStream& rng);

/// p with the smallest KS distance; ties go to the p nearest 1/2, then the smaller p.
double argmin_p(const CalibrationCurve& curve);

}  // namespace crwvar
