#include <gtest/gtest.h>

#include "oracles.hpp"
#include "relaxed/adversary.hpp"
#include "relaxed/benchmarks.hpp"

using namespace relaxed;

namespace {

RealizableSpec pert_thresholds(double gamma) {
  RealizableSpec s;
  s.kind = StreamKind::realizable_pert;
  s.cls = HypothesisClass::thresholds();
  s.domain = Domain::interval01();
  s.gamma = gamma;
  return s;
}

}  // namespace

TEST(Realizable, ThresholdStreamHasZeroBenchmark) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = gen_realizable(pert_thresholds(0.05), 200, seed);
    ASSERT_EQ(g.seq.size(), 200u);
    const double th = std::get<Threshold>(*g.witness).theta;
    EXPECT_GE(th, 0.25);
    EXPECT_LE(th, 0.75);
    for (const auto& p : g.seq.items) {
      EXPECT_EQ(p.y, p.x[0] > th ? 1 : -1);
      EXPECT_GT(std::abs(p.x[0] - th), 0.05);
    }
    EXPECT_EQ(opt_pert(g.seq, HypothesisClass::thresholds(), 0.05).value, 0.0);
  }
}

TEST(Realizable, HalfspaceMarginStreamSeparatedByWitness) {
  RealizableSpec s;
  s.kind = StreamKind::realizable_margin;
  s.cls = HypothesisClass::halfspaces(2);
  s.domain = Domain::ball(2, Norm::l2, 1.0);
  s.gamma = 0.1;
  const auto g = gen_realizable(s, 150, 3);
  const auto& w = std::get<Halfspace>(*g.witness).w;
  for (const auto& p : g.seq.items) {
    const double m = p.y * (w[0] * p.x[0] + w[1] * p.x[1]) / std::hypot(w[0], w[1]);
    EXPECT_GT(m, 0.1);
  }
  EXPECT_EQ(opt_margin(g.seq, HypothesisClass::halfspaces(2), 0.1).value, 0.0);
}

TEST(Realizable, GaussStreamKeepsDistanceFromBoundary) {
  RealizableSpec s;
  s.kind = StreamKind::realizable_gauss;
  s.cls = HypothesisClass::thresholds();
  s.domain = Domain::interval01();
  s.sigma = 0.1;
  s.epsilon = 0.3;
  const auto g = gen_realizable(s, 200, 4);
  const double th = std::get<Threshold>(*g.witness).theta;
  const double r = 0.1 * oracle::phi_inv(0.65);
  for (const auto& p : g.seq.items) EXPECT_GT(std::abs(p.x[0] - th), r - 1e-12);
  EXPECT_EQ(opt_gauss(g.seq, HypothesisClass::thresholds(), 0.1, 0.3).value, 0.0);
}

TEST(Realizable, ExplicitWitnessAndInfeasibleMargin) {
  const auto g = gen_realizable(pert_thresholds(0.1), 50, 5, BaseHypothesis{Threshold{0.5}});
  for (const auto& p : g.seq.items) EXPECT_GT(std::abs(p.x[0] - 0.5), 0.1);
  try {
    gen_realizable(pert_thresholds(0.6), 10, 5, BaseHypothesis{Threshold{0.5}});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible_margin);
  }
}

TEST(Agnostic, ZeroRateIsIdentityAndFlipsBoundBenchmark) {
  const auto base = gen_realizable(pert_thresholds(0.05), 300, 6);
  const auto same = gen_agnostic(base, 0.0, 6);
  EXPECT_EQ(same.flips, 0u);
  for (std::size_t i = 0; i < base.seq.size(); ++i) EXPECT_EQ(same.seq.items[i].y, base.seq.items[i].y);

  const auto noisy = gen_agnostic(base, 0.1, 6);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < base.seq.size(); ++i) diff += noisy.seq.items[i].y != base.seq.items[i].y;
  EXPECT_EQ(diff, noisy.flips);
  EXPECT_GT(noisy.flips, 10u);
  EXPECT_LT(noisy.flips, 60u);
  EXPECT_LE(opt_pert(noisy.seq, HypothesisClass::thresholds(), 0.05).value, static_cast<double>(noisy.flips));
  EXPECT_THROW(gen_agnostic(base, 0.5, 1), Error);
}

TEST(MistakeTree, Depths) {
  EXPECT_EQ(build_mistake_tree(4, 64, 0.005).depth(), 16);
  EXPECT_EQ(build_mistake_tree(1, 2, 0.1).depth(), 1);
  EXPECT_EQ(build_mistake_tree(2, 16, 0.01).depth(), 6);
}

TEST(MistakeTree, InfeasibleParameters) {
  try {
    build_mistake_tree(4, 64, 0.01);  // 64 * 0.02 > 1
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible_margin);
  }
  EXPECT_THROW(build_mistake_tree(4, 6, 0.01), Error);
}

TEST(MistakeTree, QueriesAreFarFromEveryThresholdAndAuditsPass) {
  auto tree = build_mistake_tree(4, 64, 0.005, 9);
  const auto& c = tree.hypothesis_class();
  for (int t = 0; t < 16 * 20; ++t) {
    const auto [x, y] = tree.round();
    for (const auto& b : c.blocks)
      for (double th : b) EXPECT_GT(std::abs(x - th), 0.005);
    (void)y;
  }
  EXPECT_EQ(tree.replays_completed(), 20u);
  EXPECT_EQ(tree.audit_failures(), 0u);
}

TEST(MistakeTree, LabelsAreFairCoins) {
  auto tree = build_mistake_tree(2, 16, 0.01, 10);
  const auto g = gen_mistake_tree(tree, 4000);
  // A learner that always predicts +1 errs on roughly half the rounds.
  std::size_t wrong = 0;
  for (const auto& p : g.seq.items) wrong += p.y != 1;
  EXPECT_NEAR(static_cast<double>(wrong), 2000.0, 4 * std::sqrt(1000.0));
  EXPECT_EQ(tree.audit_failures(), 0u);
}

TEST(MistakeTree, DeterministicPerSeed) {
  auto a = build_mistake_tree(2, 16, 0.01, 11), b = build_mistake_tree(2, 16, 0.01, 11);
  const auto sa = gen_mistake_tree(a, 200), sb = gen_mistake_tree(b, 200);
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_EQ(sa.seq.items[i].x, sb.seq.items[i].x);
    EXPECT_EQ(sa.seq.items[i].y, sb.seq.items[i].y);
  }
}

TEST(Realizable, DeterministicPerSeed) {
  const auto a = gen_realizable(pert_thresholds(0.05), 40, 12);
  const auto b = gen_realizable(pert_thresholds(0.05), 40, 12);
  const auto c = gen_realizable(pert_thresholds(0.05), 40, 13);
  EXPECT_EQ(a.seq.items[7].x, b.seq.items[7].x);
  EXPECT_NE(a.seq.items[7].x, c.seq.items[7].x);
}

TEST(StreamKind, ParseRoundTrip) {
  for (auto k : {StreamKind::realizable_pert, StreamKind::realizable_gauss, StreamKind::realizable_margin,
                 StreamKind::mistake_tree})
    EXPECT_EQ(parse_stream_kind(to_string(k)), k);
  EXPECT_THROW(parse_stream_kind("bogus"), Error);
}
