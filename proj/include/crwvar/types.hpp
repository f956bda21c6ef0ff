#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace crwvar {

/// Persistence parameter of the sign chain: P[S_n = S_{n-1}] = p.
class SignChainParams {
 public:
  /// Throws std::invalid_argument unless 0 < p < 1.
  explicit SignChainParams(double p);

  double p() const noexcept { return p_; }
  /// 2p - 1, the lag-one autocorrelation of the sign chain.
  double sign_autocorrelation() const noexcept { return rho_; }

 private:
  double p_;
  double rho_;
};

/// First and second moments of the magnitude distribution.
struct Moments {
  double m1 = 0.0;
  double m2 = 0.0;
};

struct PointMass {
  double x = 1.0;
};

struct MomentPair {
  double m1 = 0.0;
  double m2 = 0.0;
};

struct EmpiricalMagnitudes {
  std::vector<double> samples;
};

/// Distribution of the nonnegative step magnitudes.
class MagnitudeModel {
 public:
  using Variant = std::variant<PointMass, MomentPair, EmpiricalMagnitudes>;

  static MagnitudeModel point_mass(double x);
  static MagnitudeModel moments(double m1, double m2);
  static MagnitudeModel empirical(std::vector<double> samples);

  const Variant& variant() const noexcept { return v_; }
  bool sampleable() const noexcept { return !std::holds_alternative<MomentPair>(v_); }

  /// (x, x^2) for a point mass, the stored pair, or the sample moments.
  Moments moments() const;

 private:
  explicit MagnitudeModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

enum class Scale { log, linear };

Scale parse_scale(std::string_view text);
std::string_view to_string(Scale scale) noexcept;

/// Discrete-time path; values[0] is the start value.
struct PricePath {
  std::vector<double> values;

  double start_value() const { return values.front(); }
  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

struct TickEvent {
  double time = 0.0;
  double price = 0.0;
};

/**
 * Event-time price series. Times are strictly increasing, prices positive and
 * consecutive prices differ (every event is a price change).
 */
class TickSeries {
 public:
  TickSeries() = default;
  /// Validates the invariants; throws DataError on violation.
  explicit TickSeries(std::vector<TickEvent> events);

  /**
   * Builds a series from raw rows with nondecreasing timestamps: rows sharing a
   * timestamp keep the last price, and rows repeating the previous price are
   * dropped.
   */
  static TickSeries collapse(std::span<const TickEvent> raw);

  std::span<const TickEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const TickEvent& operator[](std::size_t i) const { return events_[i]; }
  const TickEvent& front() const { return events_.front(); }
  const TickEvent& back() const { return events_.back(); }
  /// back().time - front().time, or 0 for fewer than two events.
  double span() const noexcept;

 private:
  std::vector<TickEvent> events_;
};

}  // namespace crwvar
