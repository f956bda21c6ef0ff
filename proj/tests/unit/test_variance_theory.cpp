#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "crwvar/errors.hpp"
#include "crwvar/variance_theory.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace crwvar;

TEST(LimitingVarianceRate, Examples) {
  EXPECT_DOUBLE_EQ(limiting_variance_rate(SignChainParams(0.5), 0.7, 1.3).value, 1.3);
  EXPECT_DOUBLE_EQ(limiting_variance_rate(SignChainParams(0.75), 1, 1).value, 3.0);
  EXPECT_NEAR(limiting_variance_rate(SignChainParams(0.25), 1, 1).value, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(limiting_variance_rate(SignChainParams(0.5), 2, 3), std::invalid_argument);
}

TEST(VarianceRatio, Examples) {
  EXPECT_DOUBLE_EQ(variance_ratio(SignChainParams(0.5), 1.2, 7.0), 1.0);
  EXPECT_DOUBLE_EQ(variance_ratio(SignChainParams(0.75), 2, 4), 3.0);
  EXPECT_NEAR(variance_ratio(SignChainParams(0.25), 1, 2), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(variance_ratio(SignChainParams(0.3), 0, 0), DegenerateError);
}

TEST(VarianceRatio, PointMassIsOddsRatioAndAntisymmetric) {
  gen::Gen g(21);
  for (int i = 0; i < 200; ++i) {
    const double p = g.p();
    const double r = variance_ratio(SignChainParams(p), 1, 1);
    EXPECT_NEAR(r, p / (1 - p), 1e-12 * r);
    EXPECT_NEAR(r * variance_ratio(SignChainParams(1 - p), 1, 1), 1.0, 1e-12);
  }
}

TEST(LimitingVarianceRate, StrictlyIncreasingInP) {
  gen::Gen g(22);
  for (int i = 0; i < 100; ++i) {
    const double m1 = g.uniform(0.1, 2.0);
    const double m2 = m1 * m1 * g.uniform(1.0, 3.0);
    double prev = -1;
    for (double p = 0.02; p < 0.99; p += 0.01) {
      const double v = limiting_variance_rate(SignChainParams(p), m1, m2).value;
      ASSERT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(ExactVariance, Examples) {
  EXPECT_DOUBLE_EQ(exact_variance(SignChainParams(0.3), 1, 1, 1), 1.0);
  EXPECT_NEAR(exact_variance(SignChainParams(0.75), 1, 1, 2), 3.0, 1e-12);
  EXPECT_NEAR(exact_variance(SignChainParams(0.75), 1, 1, 3), 5.5, 1e-12);
  EXPECT_THROW(exact_variance(SignChainParams(0.3), 1, 1, 0), std::invalid_argument);
}

TEST(ExactVariance, MatchesEnumerationWithGeneralMoments) {
  gen::Gen g(23);
  for (int i = 0; i < 60; ++i) {
    const double p = g.p();
    const double m1 = g.uniform(0.0, 2.0);
    const double m2 = m1 * m1 + g.uniform(0.0, 1.0);
    const auto n = g.size(1, 10);
    const double want = oracle::variance_by_enumeration(p, m1, m2, n);
    EXPECT_NEAR(exact_variance(SignChainParams(p), m1, m2, n), want, 1e-10 * std::max(1.0, want));
  }
}

TEST(ExactVariance, MatchesDoubleSumAcrossLoopAndClosedForm) {
  for (double p : {0.1, 0.5, 0.9}) {
    for (std::size_t n : {50U, 400U}) {
      const double want = oracle::variance_by_double_sum(p, 1.5, 3.0, n);
      EXPECT_NEAR(exact_variance(SignChainParams(p), 1.5, 3.0, n), want, 1e-9 * want);
    }
    // Both branches around the switch agree with the limiting behaviour.
    const double below = exact_variance(SignChainParams(p), 1, 1, 10'000);
    const double above = exact_variance(SignChainParams(p), 1, 1, 10'001);
    EXPECT_NEAR(above - below, limiting_variance_rate(SignChainParams(p), 1, 1).value, 1e-6);
  }
}

TEST(ExactVariance, ConvergesAtRateOneOverN) {
  for (double p : {0.2, 0.35, 0.65, 0.8}) {
    const double lim = limiting_variance_rate(SignChainParams(p), 1, 1).value;
    double prev_err = INFINITY;
    for (std::size_t n : {100U, 1000U, 10000U, 100000U}) {
      const double err = std::abs(exact_variance(SignChainParams(p), 1, 1, n) / double(n) - lim);
      const double d = 2 * p - 1;
      // |bias| * n -> d^2 / (2 (1-p)^2) in absolute value.
      EXPECT_LE(err * double(n), std::abs(d) / ((1 - p) * (1 - p)) + 1e-9);
      EXPECT_LT(err, prev_err);
      prev_err = err;
    }
  }
}

TEST(RenewalLimitingVariance, Examples) {
  const SignChainParams q(0.37);
  EXPECT_DOUBLE_EQ(renewal_limiting_variance(q, 1.1, 2.0, 1.0).value, limiting_variance_rate(q, 1.1, 2.0).value);
  EXPECT_DOUBLE_EQ(renewal_limiting_variance(SignChainParams(0.5), 0.5, 1.0, 2.0).value, 2.0);
  EXPECT_NEAR(renewal_limiting_variance(SignChainParams(0.25), 1, 1, 3.0).value, 1.0, 1e-14);
  EXPECT_THROW(renewal_limiting_variance(q, 1, 1, -1.0), std::invalid_argument);
}

TEST(TransitionMatrix, Examples) {
  const auto one = transition_matrix_n(SignChainParams(0.3), 1);
  EXPECT_DOUBLE_EQ(one(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(one(0, 1), 0.7);
  const auto half = transition_matrix_n(SignChainParams(0.5), 17);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(half(i, j), 0.5);
  const auto sq = transition_matrix_n(SignChainParams(0.75), 2);
  EXPECT_DOUBLE_EQ(sq(0, 0), 0.625);
  EXPECT_DOUBLE_EQ(sq(1, 0), 0.375);
}

TEST(TransitionMatrix, StochasticSymmetricAndEqualToPower) {
  gen::Gen g(24);
  for (int i = 0; i < 50; ++i) {
    const double p = g.p();
    const auto n = g.size(1, 100);
    const auto m = transition_matrix_n(SignChainParams(p), n);
    const auto want = oracle::matrix_power_by_multiplication(p, n);
    for (int r = 0; r < 2; ++r) {
      EXPECT_NEAR(m(r, 0) + m(r, 1), 1.0, 1e-15);
      for (int c = 0; c < 2; ++c) {
        EXPECT_GE(m(r, c), 0.0);
        EXPECT_NEAR(m(r, c), want[r][c], 1e-12);
      }
    }
    EXPECT_EQ(m(0, 1), m(1, 0));
  }
}

TEST(SignAutocovariance, ExamplesAndEnumeration) {
  EXPECT_EQ(sign_autocovariance(SignChainParams(0.2), 0), 1.0);
  EXPECT_NEAR(sign_autocovariance(SignChainParams(0.75), 2), 0.25, 1e-15);
  EXPECT_EQ(sign_autocovariance(SignChainParams(0.5), 3), 0.0);
  for (double p : {0.1, 0.45, 0.9})
    for (std::size_t lag = 0; lag <= 8; ++lag)
      EXPECT_NEAR(sign_autocovariance(SignChainParams(p), lag), oracle::sign_product_by_enumeration(p, lag), 1e-12);
}

TEST(EnumerationOracle, ExamplesAndLimit) {
  EXPECT_NEAR(enumerate_variance_oracle(SignChainParams(0.5), 1, 4), 4.0, 1e-12);
  EXPECT_NEAR(enumerate_variance_oracle(SignChainParams(0.75), 2, 2), 12.0, 1e-12);
  EXPECT_THROW(enumerate_variance_oracle(SignChainParams(0.5), 1, 17), std::invalid_argument);
  EXPECT_NEAR(enumerate_variance_oracle(SignChainParams(0.3), 1.5, 9),
              oracle::variance_by_enumeration(0.3, 1.5, 2.25, 9), 1e-10);
}
