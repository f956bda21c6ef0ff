#include "crwvar/variance_theory.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "crwvar/errors.hpp"

namespace crwvar {

namespace {

constexpr std::size_t kClosedFormThreshold = 10'000;

void require_admissible(double m1, double m2) {
  if (!(m1 >= 0.0) || !std::isfinite(m1) || !std::isfinite(m2)) {
    throw std::invalid_argument("moments must be finite with m1 >= 0");
  }
  // Relative slack absorbs rounding in sample moments of a constant sample.
  if (m2 < m1 * m1 * (1.0 - 1e-12)) throw std::invalid_argument("inadmissible moments");
}

}  // namespace

VarianceRate limiting_variance_rate(const SignChainParams& params, double m1, double m2) {
  require_admissible(m1, m2);
  const double p = params.p();
  return {m2 + m1 * m1 * params.sign_autocorrelation() / (1.0 - p)};
}

double variance_ratio(const SignChainParams& params, double m1, double m2) {
  require_admissible(m1, m2);
  if (m2 == 0.0) throw DegenerateError("degenerate magnitudes");
  return 1.0 + (m1 * m1 / m2) * params.sign_autocorrelation() / (1.0 - params.p());
}

double exact_variance(const SignChainParams& params, double m1, double m2, std::size_t n) {
  require_admissible(m1, m2);
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  const double d = params.sign_autocorrelation();
  const double nd = static_cast<double>(n);
  double geometric = 0.0;  // sum_{i=1}^{n} d^i
  if (n > kClosedFormThreshold) {
    geometric = d * (1.0 - std::pow(d, nd)) / (1.0 - d);
  } else {
    double term = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
      term *= d;
      geometric += term;
    }
  }
  return nd * m2 + m1 * m1 * (nd * d - geometric) / (1.0 - params.p());
}

VarianceRate renewal_limiting_variance(const SignChainParams& params, double m1, double m2,
                                       double mu_tau) {
  if (!(mu_tau >= 0.0) || !std::isfinite(mu_tau)) {
    throw std::invalid_argument("event rate must be finite and >= 0");
  }
  return {mu_tau * limiting_variance_rate(params, m1, m2).value};
}

TransitionMatrix2 transition_matrix_n(const SignChainParams& params, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  const double dn = std::pow(params.sign_autocorrelation(), static_cast<double>(n));
  const double stay = 0.5 * (1.0 + dn);
  const double move = 0.5 * (1.0 - dn);
  return {{{{stay, move}, {move, stay}}}};
}

double sign_autocovariance(const SignChainParams& params, std::size_t lag) {
  return std::pow(params.sign_autocorrelation(), static_cast<double>(lag));
}

double enumerate_variance_oracle(const SignChainParams& params, double x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (n > kMaxEnumerationSteps) throw std::invalid_argument("enumeration too large");
  const double p = params.p();
  double mean = 0.0;
  double second = 0.0;
  // Bit i of `mask` is the sign of step i (1 = up).
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    double prob = 0.5;
    double sum = (mask & 1U) ? 1.0 : -1.0;
    for (std::size_t i = 1; i < n; ++i) {
      const bool up = (mask >> i) & 1U;
      const bool prev_up = (mask >> (i - 1)) & 1U;
      prob *= up == prev_up ? p : 1.0 - p;
      sum += up ? 1.0 : -1.0;
    }
    mean += prob * x * sum;
    second += prob * x * x * sum * sum;
  }
  return second - mean * mean;
}

}  // namespace crwvar
