#pragma once

#include <concepts>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "crwvar/errors.hpp"
#include "crwvar/rng.hpp"
#include "crwvar/types.hpp"

namespace crwvar {

// Simulators take their RngStream by value: the output is a pure function of
// the arguments and the stream identity.

/// Markov sign chain S_1, S_2, ... with persistence p.
class SignChain {
 public:
  /// With no previous sign the first call returns a symmetric +/-1.
  explicit SignChain(const SignChainParams& params, std::optional<int> previous = std::nullopt)
      : p_(params.p()), prev_(previous.value_or(0)) {}

  int next(RngStream& rng) noexcept {
    prev_ = prev_ == 0 ? rng.sign() : (rng.uniform() < p_ ? prev_ : -prev_);
    return prev_;
  }

  int previous() const noexcept { return prev_; }

 private:
  double p_;
  int prev_;
};

/// Draws from a sampleable MagnitudeModel; a point mass consumes no randomness.
class MagnitudeSampler {
 public:
  /// Non-owning; `model` must outlive the sampler. Throws std::invalid_argument
  /// ("magnitude model not sampleable") for a moment pair.
  explicit MagnitudeSampler(const MagnitudeModel& model);

  double draw(RngStream& rng) const noexcept {
    if (samples_.empty()) return point_;
    return samples_[rng.below(samples_.size())];
  }

 private:
  double point_ = 0.0;
  std::span<const double> samples_;
};

/// Symmetric +/-1 random walk from 0.
PricePath simulate_rw(std::size_t n_steps, RngStream rng);
double rw_terminal(std::size_t n_steps, RngStream rng);

/// Correlated random walk from 0 with a symmetric first step.
PricePath simulate_crw(const SignChainParams& params, std::size_t n_steps, RngStream rng);
double crw_terminal(const SignChainParams& params, std::size_t n_steps, RngStream rng);

/// Z_n = sum S_i * delta_i with delta_i i.i.d. from the magnitude model.
PricePath simulate_semiparametric(const SignChainParams& params, const MagnitudeModel& mag,
                                  std::size_t n_steps, RngStream rng);
double semiparametric_terminal(const SignChainParams& params, const MagnitudeModel& mag,
                               std::size_t n_steps, RngStream rng);

// ---------------------------------------------------------------------------
// Markov renewal process

struct JointDraw {
  double magnitude = 0.0;
  double tau = 0.0;
};

/// Joint law of (magnitude, inter-event time) given the current and previous signs.
template <class M>
concept JointSampler = requires(const M& m, int s_now, int s_prev, RngStream& rng) {
  { m.draw(s_now, s_prev, rng) } -> std::same_as<JointDraw>;
};

/// Magnitudes and inter-event times independent of each other and of the signs.
class IndependentJoint {
 public:
  enum class TauLaw { fixed, exponential };

  IndependentJoint(const MagnitudeModel& magnitudes, TauLaw law, double tau_mean);

  JointDraw draw(int, int, RngStream& rng) const noexcept {
    const double mag = magnitudes_.draw(rng);
    const double tau = law_ == TauLaw::fixed ? tau_mean_ : rng.exponential(tau_mean_);
    return {mag, tau};
  }

  /// Long-run event rate 1 / E[tau].
  double event_rate() const noexcept { return 1.0 / tau_mean_; }

 private:
  std::shared_ptr<const MagnitudeModel> model_;
  MagnitudeSampler magnitudes_;
  TauLaw law_;
  double tau_mean_;
};

inline constexpr std::size_t kDefaultMaxEvents = 10'000'000;

struct RenewalOptions {
  Scale scale = Scale::log;
  std::size_t max_events = kDefaultMaxEvents;
};

/// Net signed displacement over a horizon without materialising the events.
struct RenewalOutcome {
  double increment = 0.0;
  std::size_t events = 0;
  int last_sign = 0;
};

/**
 * Runs the renewal recursion up to `horizon`: each event draws the next sign from
 * the chain, then (magnitude, tau) from the joint law keyed by (new sign,
 * previous sign). An event landing exactly on the horizon is counted.
 * `on_event(time, cumulative_increment, sign)` is called per accepted event.
 */
template <JointSampler M, class OnEvent>
RenewalOutcome run_renewal(const SignChainParams& params, const M& joint, double horizon,
                           std::optional<int> start_sign, RngStream& rng, std::size_t max_events,
                           OnEvent&& on_event) {
  if (start_sign && *start_sign != 1 && *start_sign != -1) {
    throw std::invalid_argument("start sign must be +1 or -1");
  }
  SignChain chain(params, start_sign ? *start_sign : rng.sign());
  RenewalOutcome out;
  out.last_sign = chain.previous();
  double t = 0.0;
  while (true) {
    const int s_prev = chain.previous();
    const int s_now = chain.next(rng);
    const JointDraw d = joint.draw(s_now, s_prev, rng);
    t += d.tau;
    if (t > horizon) break;
    if (++out.events > max_events) throw DegenerateError("runaway event rate");
    out.increment += s_now * d.magnitude;
    out.last_sign = s_now;
    on_event(t, out.increment, s_now);
  }
  return out;
}

template <JointSampler M>
RenewalOutcome renewal_increment(const SignChainParams& params, const M& joint, double horizon,
                                 std::optional<int> start_sign, RngStream rng,
                                 std::size_t max_events = kDefaultMaxEvents) {
  return run_renewal(params, joint, horizon, start_sign, rng, max_events, [](double, double, int) {});
}

/// Event series of the renewal process started at (0, start_price).
template <JointSampler M>
TickSeries simulate_renewal(const SignChainParams& params, const M& joint, double horizon,
                            double start_price, std::optional<int> start_sign, RngStream rng,
                            const RenewalOptions& options = {}) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(start_price > 0.0) && options.scale == Scale::log) {
    throw std::invalid_argument("log-scale renewal needs a positive start price");
  }
  std::vector<TickEvent> events;
  const double log_start = options.scale == Scale::log ? std::log(start_price) : 0.0;
  run_renewal(params, joint, horizon, start_sign, rng, options.max_events,
              [&](double t, double cum, int) {
                const double price =
                    options.scale == Scale::log ? std::exp(log_start + cum) : start_price + cum;
                if (!(price > 0.0)) throw DataError("linear-scale path reached a nonpositive price");
                events.push_back({t, price});
              });
  return TickSeries(std::move(events));
}

}  // namespace crwvar
