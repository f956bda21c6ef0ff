#include "crwvar/simulate.hpp"

#include <stdexcept>

namespace crwvar {

namespace {

void require_steps(std::size_t n_steps) {
  if (n_steps == 0) throw std::invalid_argument("n_steps must be >= 1");
}

}  // namespace

MagnitudeSampler::MagnitudeSampler(const MagnitudeModel& model) {
  const auto& v = model.variant();
  if (const auto* pm = std::get_if<PointMass>(&v)) {
    point_ = pm->x;
  } else if (const auto* e = std::get_if<EmpiricalMagnitudes>(&v)) {
    samples_ = e->samples;
  } else {
    throw std::invalid_argument("magnitude model not sampleable");
  }
}

PricePath simulate_rw(std::size_t n_steps, RngStream rng) {
  require_steps(n_steps);
  PricePath path;
  path.values.resize(n_steps + 1);
  double x = 0.0;
  path.values[0] = x;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    x += rng.sign();
    path.values[i] = x;
  }
  return path;
}

double rw_terminal(std::size_t n_steps, RngStream rng) {
  require_steps(n_steps);
  double x = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) x += rng.sign();
  return x;
}

PricePath simulate_crw(const SignChainParams& params, std::size_t n_steps, RngStream rng) {
  require_steps(n_steps);
  SignChain chain(params);
  PricePath path;
  path.values.resize(n_steps + 1);
  double y = 0.0;
  path.values[0] = y;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    y += chain.next(rng);
    path.values[i] = y;
  }
  return path;
}

double crw_terminal(const SignChainParams& params, std::size_t n_steps, RngStream rng) {
  require_steps(n_steps);
  SignChain chain(params);
  double y = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) y += chain.next(rng);
  return y;
}

PricePath simulate_semiparametric(const SignChainParams& params, const MagnitudeModel& mag,
                                  std::size_t n_steps, RngStream rng) {
  require_steps(n_steps);
  const MagnitudeSampler sampler(mag);
  SignChain chain(params);
  PricePath path;
  path.values.resize(n_steps + 1);
  double z = 0.0;
  path.values[0] = z;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const int s = chain.next(rng);
    z += s * sampler.draw(rng);
    path.values[i] = z;
  }
  return path;
}

double semiparametric_terminal(const SignChainParams& params, const MagnitudeModel& mag,
                               std::size_t n_steps, RngStream rng) {
  require_steps(n_steps);
  const MagnitudeSampler sampler(mag);
  SignChain chain(params);
  double z = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const int s = chain.next(rng);
    z += s * sampler.draw(rng);
  }
  return z;
}

IndependentJoint::IndependentJoint(const MagnitudeModel& magnitudes, TauLaw law, double tau_mean)
    : model_(std::make_shared<const MagnitudeModel>(magnitudes)),
      magnitudes_(*model_),
      law_(law),
      tau_mean_(tau_mean) {
  if (!(tau_mean > 0.0)) throw std::invalid_argument("mean inter-event time must be positive");
}

}  // namespace crwvar
