#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "crwvar/errors.hpp"
#include "crwvar/estimation.hpp"
#include "crwvar/simulate.hpp"
#include "crwvar/variance_theory.hpp"
#include "support/generators.hpp"

using namespace crwvar;

namespace {

std::vector<double> prices_from_log_path(const PricePath& path, double start) {
  std::vector<double> out;
  out.reserve(path.values.size());
  for (double z : path.values) out.push_back(start * std::exp(z));
  return out;
}

}  // namespace

TEST(ExtractIncrements, Examples) {
  const double e = std::exp(1.0);
  const std::vector<double> a{100, 100 * e, 100};
  const auto inc = extract_increments(a);
  EXPECT_EQ(inc.signs, (std::vector<int>{1, -1}));
  EXPECT_NEAR(inc.magnitudes[0], 1.0, 1e-14);
  EXPECT_NEAR(inc.magnitudes[1], 1.0, 1e-14);

  const std::vector<double> b{5, 5, 6};
  const auto z = extract_increments(b);
  EXPECT_EQ(z.signs, std::vector<int>{1});
  EXPECT_EQ(z.dropped_zero_count, 1U);
  EXPECT_DOUBLE_EQ(z.zero_fraction(), 0.5);

  const std::vector<double> up{1, 2, 3, 4, 5};
  for (int s : extract_increments(up, Scale::linear).signs) EXPECT_EQ(s, 1);
}

TEST(ExtractIncrements, Errors) {
  EXPECT_THROW(extract_increments(std::vector<double>{1.0}), DataError);
  EXPECT_THROW(extract_increments(std::vector<double>{1.0, -2.0}), DataError);
  EXPECT_NO_THROW(extract_increments(std::vector<double>{1.0, -2.0}, Scale::linear));
}

TEST(ExtractIncrements, MagnitudesPositiveAndReconstruct) {
  gen::Gen g(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto prices = g.prices(g.size(2, 400), 0.1);
    const auto inc = extract_increments(prices);
    ASSERT_EQ(inc.signs.size(), inc.magnitudes.size());
    long double sum = 0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
      ASSERT_GT(inc.magnitudes[i], 0.0);
      sum += inc.signs[i] * inc.magnitudes[i];
    }
    EXPECT_NEAR(static_cast<double>(sum), std::log(prices.back() / prices.front()), 1e-12);
    EXPECT_EQ(inc.size() + inc.dropped_zero_count, prices.size() - 1);
  }
}

TEST(ExtractIncrements, LogScaleInvariantUnderRescaling) {
  gen::Gen g(42);
  for (int trial = 0; trial < 30; ++trial) {
    auto prices = g.prices(300, 0.02);
    const auto a = analyze_asset(prices);
    const double c = g.uniform(0.01, 1000.0);
    for (auto& x : prices) x *= c;
    const auto b = analyze_asset(prices);
    EXPECT_EQ(a.p_hat, b.p_hat);
    EXPECT_NEAR(a.m1_hat, b.m1_hat, 1e-12);
    EXPECT_NEAR(a.m2_hat, b.m2_hat, 1e-12);
    EXPECT_NEAR(a.sigma_bar_sq, b.sigma_bar_sq, 1e-9);
  }
}

TEST(EstimateP, Examples) {
  EXPECT_DOUBLE_EQ(estimate_p(std::vector<int>{1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(estimate_p(std::vector<int>{1, -1, 1, -1}), 0.0);
  EXPECT_DOUBLE_EQ(estimate_p(std::vector<int>{1, 1, -1, 1, 1}), 0.5);
  EXPECT_THROW(estimate_p(std::vector<int>{1}), DataError);
  EstimatorOptions smooth;
  smooth.pseudo_count = 1.0;
  EXPECT_DOUBLE_EQ(estimate_p(std::vector<int>{1, 1, 1, 1}, smooth), 4.0 / 5.0);
}

TEST(EstimateMoments, Examples) {
  const auto a = estimate_moments(std::vector<double>{2, 2, 2});
  EXPECT_DOUBLE_EQ(a.m1, 2);
  EXPECT_DOUBLE_EQ(a.m2, 4);
  const auto b = estimate_moments(std::vector<double>{1, 3});
  EXPECT_DOUBLE_EQ(b.m1, 2);
  EXPECT_DOUBLE_EQ(b.m2, 5);
  const auto c = estimate_moments(std::vector<double>{0});
  EXPECT_EQ(c.m1, 0);
  EXPECT_EQ(c.m2, 0);
  EXPECT_THROW(estimate_moments(std::vector<double>{}), DataError);
}

TEST(AnalyzeAsset, RatioIdentity) {
  gen::Gen g(43);
  for (int trial = 0; trial < 40; ++trial) {
    const auto r = analyze_asset(g.prices(g.size(20, 500)));
    ASSERT_GE(r.m2_hat, r.m1_hat * r.m1_hat);
    EXPECT_NEAR(r.sigma_bar_sq * r.m2_hat,
                limiting_variance_rate(SignChainParams(r.p_hat), r.m1_hat, r.m2_hat).value, 1e-12);
    EXPECT_NEAR(r.sigma_bar_sq,
                1 + (r.m1_hat * r.m1_hat / r.m2_hat) * (2 * r.p_hat - 1) / (1 - r.p_hat), 1e-12);
  }
}

TEST(AnalyzeAsset, DegenerateAndStale) {
  EXPECT_THROW(analyze_asset(std::vector<double>{1, 2, 3, 4}), DegenerateError);
  EXPECT_THROW(analyze_asset(std::vector<double>{1, 2, 1, 2}), DegenerateError);
  std::vector<double> stale{10, 11, 11, 10, 10, 11, 12, 12, 11, 12};
  const auto r = analyze_asset(stale);
  EXPECT_TRUE(r.stale_flag);
  EXPECT_EQ(r.dropped_zero_count, 3U);
}

TEST(AnalyzeAsset, RecoversPersistence) {
  gen::Gen g(44);
  const auto mag = MagnitudeModel::empirical(g.magnitudes(2000, 0.01));
  for (double p : {0.25, 0.5}) {
    const auto path = simulate_semiparametric(SignChainParams(p), mag, 100'000, RngStream(45, 0));
    const auto r = analyze_asset(prices_from_log_path(path, 100.0));
    EXPECT_NEAR(r.p_hat, p, 0.01);
    if (p == 0.5) {
      EXPECT_NEAR(r.sigma_bar_sq, 1.0, 0.02);
    }
  }
}

TEST(AnalyzeAsset, ErrorShrinksWithLength) {
  const auto mag = MagnitudeModel::point_mass(0.01);
  std::vector<double> rmse;
  for (std::size_t n : {1000U, 10'000U, 100'000U}) {
    double sq = 0;
    constexpr int reps = 40;
    for (int k = 0; k < reps; ++k) {
      const auto path = simulate_semiparametric(SignChainParams(0.6), mag, n, RngStream(46, n + k));
      const double e = analyze_asset(prices_from_log_path(path, 1.0)).p_hat - 0.6;
      sq += e * e;
    }
    rmse.push_back(std::sqrt(sq / reps));
    // Binomial standard error of the proportion.
    EXPECT_LT(rmse.back(), 2.0 * std::sqrt(0.24 / double(n)));
  }
  EXPECT_LT(rmse[2], rmse[0]);
}
