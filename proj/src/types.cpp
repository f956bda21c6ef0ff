#include "crwvar/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crwvar/errors.hpp"

namespace crwvar {

SignChainParams::SignChainParams(double p) : p_(p), rho_(2.0 * p - 1.0) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("persistence probability must lie in (0, 1), got " +
                                std::to_string(p));
  }
}

MagnitudeModel MagnitudeModel::point_mass(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("point mass must be >= 0");
  return MagnitudeModel(PointMass{x});
}

MagnitudeModel MagnitudeModel::moments(double m1, double m2) {
  if (!(m1 >= 0.0) || !std::isfinite(m2)) throw std::invalid_argument("moments must be finite, m1 >= 0");
  if (m2 < m1 * m1 * (1.0 - 1e-12)) throw std::invalid_argument("inadmissible moments: m2 < m1^2");
  return MagnitudeModel(MomentPair{m1, m2});
}

MagnitudeModel MagnitudeModel::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical magnitude sample is empty");
  for (double s : samples) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("magnitudes must be finite and >= 0");
  }
  return MagnitudeModel(EmpiricalMagnitudes{std::move(samples)});
}

Moments MagnitudeModel::moments() const {
  struct Visitor {
    Moments operator()(const PointMass& pm) const { return {pm.x, pm.x * pm.x}; }
    Moments operator()(const MomentPair& mp) const { return {mp.m1, mp.m2}; }
    Moments operator()(const EmpiricalMagnitudes& e) const {
      double s1 = 0.0;
      double s2 = 0.0;
      for (double x : e.samples) {
        s1 += x;
        s2 += x * x;
      }
      const auto n = static_cast<double>(e.samples.size());
      const double m1 = s1 / n;
      return {m1, std::max(s2 / n, m1 * m1)};
    }
  };
  return std::visit(Visitor{}, v_);
}

Scale parse_scale(std::string_view text) {
  if (text == "log") return Scale::log;
  if (text == "linear") return Scale::linear;
  throw UsageError("scale must be 'log' or 'linear', got '" + std::string(text) + "'");
}

std::string_view to_string(Scale scale) noexcept { return scale == Scale::log ? "log" : "linear"; }

TickSeries::TickSeries(std::vector<TickEvent> events) : events_(std::move(events)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!(e.time >= 0.0) || !std::isfinite(e.time)) {
      throw DataError("tick " + std::to_string(i) + ": time must be finite and >= 0");
    }
    if (!(e.price > 0.0) || !std::isfinite(e.price)) {
      throw DataError("tick " + std::to_string(i) + ": price must be positive");
    }
    if (i > 0) {
      if (!(e.time > events_[i - 1].time)) {
        throw DataError("tick " + std::to_string(i) + ": times must be strictly increasing");
      }
      if (e.price == events_[i - 1].price) {
        throw DataError("tick " + std::to_string(i) + ": price repeats its predecessor");
      }
    }
  }
}

TickSeries TickSeries::collapse(std::span<const TickEvent> raw) {
  std::vector<TickEvent> out;
  out.reserve(raw.size());
  for (const auto& e : raw) {
    if (!out.empty() && e.time < out.back().time) {
      throw DataError("tick timestamps must be nondecreasing");
    }
    if (!out.empty() && e.time == out.back().time) {
      out.back().price = e.price;
      // The replaced price may now repeat the event before it.
      if (out.size() >= 2 && out[out.size() - 2].price == out.back().price) out.pop_back();
      continue;
    }
    if (!out.empty() && e.price == out.back().price) continue;
    out.push_back(e);
  }
  return TickSeries(std::move(out));
}

double TickSeries::span() const noexcept {
  return events_.size() < 2 ? 0.0 : events_.back().time - events_.front().time;
}

}  // namespace crwvar
