#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "relaxed/mw_core.hpp"

using namespace relaxed;

namespace {

/// Plain-weight MW (no logs) as a reference for small instances.
std::vector<double> naive_probs(const std::vector<std::vector<double>>& losses, std::size_t n, double eta) {
  std::vector<double> w(n, 1.0);
  for (const auto& row : losses)
    for (std::size_t i = 0; i < n; ++i) w[i] *= std::exp(-eta * row[i]);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  return w;
}

}  // namespace

TEST(MwInit, UniformDistribution) {
  EXPECT_EQ(mw_init(1, 1.0).probabilities(), (std::vector<double>{1.0}));
  for (double p : mw_init(4, 0.5).probabilities()) EXPECT_DOUBLE_EQ(p, 0.25);
  for (double p : mw_init(2, std::log(2.0)).probabilities()) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(MwInit, Errors) {
  try {
    mw_init(0, 1.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_expert_set);
  }
  EXPECT_THROW(mw_init(3, 0.0), Error);
}

TEST(MwUpdate, HandComputedExamples) {
  const double eta = std::log(2.0);
  auto s = mw_init(2, eta);
  const std::vector<double> l{1.0, 0.0};
  const auto s1 = mw_update(s, l);
  EXPECT_NEAR(s1.probabilities()[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s1.probabilities()[1], 2.0 / 3.0, 1e-15);
  const auto s2 = mw_update(s1, l);
  EXPECT_NEAR(s2.probabilities()[0], 1.0 / 5.0, 1e-15);
  EXPECT_NEAR(s2.probabilities()[1], 4.0 / 5.0, 1e-15);
  EXPECT_EQ(s2.round, 2u);
}

TEST(MwUpdate, ZeroLossesLeaveDistributionUnchanged) {
  auto s = mw_update(mw_init(3, 0.7), std::vector<double>{0.2, 0.9, 0.0});
  const auto before = s.probabilities();
  mw_update_in_place(s, std::vector<double>{0.0, 0.0, 0.0});
  const auto after = s.probabilities();
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(before[i], after[i], 1e-15);
}

TEST(MwUpdate, RejectsBadLosses) {
  auto s = mw_init(2, 1.0);
  try {
    mw_update_in_place(s, std::vector<double>{0.5, 1.5});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_loss);
  }
  try {
    mw_update_in_place(s, std::vector<double>{0.5});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
}

TEST(MwUpdate, LogDomainMatchesNaiveWeights) {
  CounterRng rng(5);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + rng.below(8), t = 1 + rng.below(40);
    const double eta = rng.uniform(0.05, 3.0);
    std::vector<std::vector<double>> losses(t, std::vector<double>(n));
    for (auto& r : losses)
      for (auto& v : r) v = rng.uniform();
    auto s = mw_init(n, eta);
    for (const auto& r : losses) mw_update_in_place(s, r);
    const auto want = naive_probs(losses, n, eta);
    const auto got = s.probabilities();
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(MwUpdate, StableUnderHugeCumulativeLoss) {
  auto s = mw_init(2, 20.0);
  for (int t = 0; t < 10'000; ++t) mw_update_in_place(s, std::vector<double>{1.0, 0.0});
  const auto p = s.probabilities();
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 1.0);
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(mw_sample(s, rng), 1u);
}

TEST(MwSample, SingleExpertAndFrequency) {
  CounterRng rng(7);
  const auto one = mw_init(1, 1.0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(mw_sample(one, rng), 0u);
  const auto two = mw_init(2, 1.0);
  CounterRng r7(7);
  std::size_t zeros = 0;
  for (int i = 0; i < 100'000; ++i) zeros += mw_sample(two, r7) == 0;
  const double f = zeros / 1e5;
  EXPECT_GE(f, 0.495);
  EXPECT_LE(f, 0.505);
}

TEST(Eta, DefaultAndTuned) {
  EXPECT_NEAR(default_eta(2.0, 100), 0.4, 1e-15);
  EXPECT_EQ(default_eta(0.0, 10), 1e-6);
  EXPECT_NEAR(default_eta(std::log(3.0), 8), std::sqrt(8 * std::log(3.0) / 8), 1e-15);
  EXPECT_NEAR(default_eta(std::log(3.0), 8), 1.0482, 1e-3);
  EXPECT_EQ(tuned_eta(std::log(4.0), 0.0), 20.0);
  EXPECT_NEAR(tuned_eta(2.0, 9.0), std::log(1.0 + std::sqrt(4.0 / 9.0)), 1e-15);
}

TEST(Certificate, FormulaExamples) {
  EXPECT_EQ(regret_certificate(0.0, 17.0).bound, 0.0);
  EXPECT_NEAR(regret_certificate(std::log(2.0), 0.0).bound, 0.693147, 1e-6);
  EXPECT_DOUBLE_EQ(regret_certificate(4.0, 50.0).bound, 24.0);
}

TEST(LossBound, RandomMatricesBothEtas) {
  // Property: realized expected loss never exceeds (eta OPT + ln N) / (1 - e^-eta),
  // and with tuned eta the regret is within sqrt(2 OPT ln N) + ln N.
  CounterRng rng(12);
  for (int inst = 0; inst < 300; ++inst) {
    const std::size_t n = 1 + rng.below(8), t = 1 + rng.below(50);
    std::vector<std::vector<double>> losses(t, std::vector<double>(n));
    for (auto& r : losses)
      for (auto& v : r) v = rng.bernoulli(0.5) ? static_cast<double>(rng.bernoulli(0.4)) : rng.uniform();
    std::vector<double> tot(n, 0.0);
    for (const auto& r : losses)
      for (std::size_t i = 0; i < n; ++i) tot[i] += r[i];
    const double opt = *std::min_element(tot.begin(), tot.end()), ln_n = std::log(static_cast<double>(n));
    for (const double eta : {default_eta(ln_n, t), tuned_eta(ln_n, opt)}) {
      auto s = mw_init(n, eta);
      double realized = 0.0;
      for (const auto& r : losses) {
        realized += s.expected(r);
        mw_update_in_place(s, r);
      }
      EXPECT_LE(realized, mw_loss_bound(eta, opt, ln_n) + 1e-9);
    }
    auto s = mw_init(n, tuned_eta(ln_n, opt));
    double realized = 0.0;
    for (const auto& r : losses) {
      realized += s.expected(r);
      mw_update_in_place(s, r);
    }
    EXPECT_LE(realized - opt, regret_certificate(ln_n, opt).bound + 1e-6);
  }
}

TEST(Json, WeightStateRoundTrip) {
  auto s = mw_update(mw_init(3, 0.3), std::vector<double>{0.1, 0.2, 1.0});
  const nlohmann::json j = s;
  const auto back = j.get<WeightState>();
  EXPECT_EQ(back.log_weights, s.log_weights);
  EXPECT_EQ(back.eta, s.eta);
  EXPECT_EQ(back.round, s.round);
}
