#pragma once

#include <array>
#include <cstddef>

#include "crwvar/types.hpp"

namespace crwvar {

/// Variance per unit step (discrete model) or per unit time (renewal model).
struct VarianceRate {
  double value = 0.0;
};

/// Row-stochastic, symmetric 2x2 matrix; index 0 is the down state, 1 the up state.
struct TransitionMatrix2 {
  std::array<std::array<double, 2>, 2> entries{};

  double operator()(std::size_t row, std::size_t col) const { return entries[row][col]; }
};

/// lim Var[Z_n]/n = m2 + m1^2 (2p-1)/(1-p). Throws std::invalid_argument
/// ("inadmissible moments") when m2 < m1^2.
VarianceRate limiting_variance_rate(const SignChainParams& params, double m1, double m2);

/// Limiting variance normalised by the p = 1/2 value m2. Throws DegenerateError for m2 == 0.
double variance_ratio(const SignChainParams& params, double m1, double m2);

/**
 * Exact Var[Z_n] = n m2 + m1^2 sum_{i=1}^{n} ((2p-1) - (2p-1)^i) / (1-p).
 * The geometric sum is accumulated term by term up to n = 10^4 and evaluated in
 * closed form beyond that.
 */
double exact_variance(const SignChainParams& params, double m1, double m2, std::size_t n);

/// mu_tau times the discrete limiting rate.
VarianceRate renewal_limiting_variance(const SignChainParams& params, double m1, double m2,
                                       double mu_tau);

/// Closed-form P^n = 1/2 [[1 + d^n, 1 - d^n], [1 - d^n, 1 + d^n]] with d = 2p - 1.
TransitionMatrix2 transition_matrix_n(const SignChainParams& params, std::size_t n);

/// E[S_i S_{i+lag}] = (2p-1)^lag.
double sign_autocovariance(const SignChainParams& params, std::size_t lag);

inline constexpr std::size_t kMaxEnumerationSteps = 16;

/**
 * Brute-force Var[x * sum S_i] over all 2^n sign sequences weighted by their
 * chain probabilities, with a symmetric first sign. Throws std::invalid_argument
 * ("enumeration too large") for n > 16.
 */
double enumerate_variance_oracle(const SignChainParams& params, double x, std::size_t n);

}  // namespace crwvar
