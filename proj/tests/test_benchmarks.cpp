#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "relaxed/benchmarks.hpp"

using namespace relaxed;

namespace {

Sequence seq1d(std::initializer_list<std::pair<double, int>> pts) {
  Sequence s{Domain::interval01(), {}};
  for (auto [x, y] : pts) s.items.push_back({{x}, y});
  return s;
}

Sequence random_threshold_seq(CounterRng& rng, std::size_t t, double noise) {
  Sequence s{Domain::interval01(), {}};
  const double th = rng.uniform(0.2, 0.8);
  for (std::size_t i = 0; i < t; ++i) {
    const double x = rng.uniform();
    int y = x > th ? 1 : -1;
    if (rng.bernoulli(noise)) y = -y;
    s.items.push_back({{x}, y});
  }
  return s;
}

Sequence random_disc_seq(CounterRng& rng, std::size_t t, double noise) {
  Sequence s{Domain::ball(2, Norm::l2, 1.0), {}};
  const double a = rng.uniform(0, 2 * std::numbers::pi);
  for (std::size_t i = 0; i < t; ++i) {
    Point x;
    do x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    while (x[0] * x[0] + x[1] * x[1] > 1.0);
    int y = std::cos(a) * x[0] + std::sin(a) * x[1] >= 0 ? 1 : -1;
    if (rng.bernoulli(noise)) y = -y;
    s.items.push_back({x, y});
  }
  return s;
}

/// Candidate thetas for brute force: dense grid plus every data-derived breakpoint.
std::vector<double> theta_candidates(const Sequence& s, double r) {
  std::vector<double> c;
  for (int k = 0; k <= 20'000; ++k) c.push_back(k / 20'000.0);
  std::vector<double> br;
  for (const auto& p : s.items)
    for (double v : {p.x[0] - r, p.x[0] + r, p.x[0]})
      if (v >= 0 && v <= 1) br.push_back(v);
  for (double a : br) {
    c.push_back(a);
    for (double b : br) c.push_back(0.5 * (a + b));
  }
  return c;
}

double brute_pert_thresholds(const Sequence& s, double gamma) {
  double best = 1e18;
  for (double th : theta_candidates(s, gamma)) {
    double v = 0;
    for (const auto& p : s.items) v += p.y * (p.x[0] - th) <= gamma;
    best = std::min(best, v);
  }
  return best;
}

double brute_gauss_thresholds(const Sequence& s, double sigma, double eps) {
  const double r = sigma * oracle::phi_inv(0.5 + eps / 2);
  double best = 1e18;
  for (double th : theta_candidates(s, r)) {
    double v = 0;
    for (const auto& p : s.items) v += p.y * (2 * oracle::phi((p.x[0] - th) / sigma) - 1) <= eps;
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

TEST(GaussMargin, FormulaAndErrors) {
  EXPECT_NEAR(gauss_margin(0.5, 0.4), 0.5 * oracle::phi_inv(0.7), 1e-12);
  EXPECT_NEAR(gauss_margin(0.5, 0.4), 0.2622, 1e-4);
  EXPECT_THROW(gauss_margin(0.0, 0.4), Error);
  EXPECT_THROW(gauss_margin(0.5, 1.0), Error);
}

TEST(OptPert, WorkedExamples) {
  EXPECT_EQ(opt_pert(Sequence{Domain::interval01(), {}}, HypothesisClass::thresholds(), 0.1).value, 0.0);
  const auto s = seq1d({{0.2, -1}, {0.8, 1}});
  EXPECT_EQ(opt_pert(s, HypothesisClass::thresholds(), 0.25).value, 0.0);
  EXPECT_EQ(opt_pert(s, HypothesisClass::thresholds(), 0.4).value, 1.0);

  Sequence h{Domain::ball(2, Norm::l2, 1.0), {{{1.0, 0.0}, 1}}};
  const auto b = opt_pert(h, HypothesisClass::halfspaces(2), 0.5);
  EXPECT_EQ(b.value, 0.0);
  const auto w = b.witness.at("w").get<Point>();
  EXPECT_GT(w[0] * 1.0 / std::hypot(w[0], w[1]), 0.5);
}

TEST(OptPert, HalfspaceBallBruteForceAgrees) {
  // Robust loss on the l2 ball by sampling perturbations agrees with the margin formula.
  CounterRng rng(4);
  const Point w{std::cos(0.3), std::sin(0.3)};
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const int y = rng.rademacher();
    const double gamma = 0.2;
    bool wrong = false;
    for (int k = 0; k < 10'000 && !wrong; ++k) {
      const double a = 2 * std::numbers::pi * k / 10'000.0;
      const Point xp{x[0] + gamma * std::cos(a), x[1] + gamma * std::sin(a)};
      wrong = (w[0] * xp[0] + w[1] * xp[1] >= 0 ? 1 : -1) != y;
    }
    const double m = normalized_margin(w, {x, y}, Norm::l2);
    if (std::abs(m - gamma) > 1e-3) {
      EXPECT_EQ(wrong, m <= gamma) << m;
    }
  }
}

TEST(OptPert, ThresholdsMatchBruteForce) {
  CounterRng rng(5);
  for (int inst = 0; inst < 40; ++inst) {
    const auto s = random_threshold_seq(rng, 1 + rng.below(40), 0.2);
    const double gamma = rng.uniform(0.0, 0.2);
    EXPECT_EQ(opt_pert(s, HypothesisClass::thresholds(), gamma).value, brute_pert_thresholds(s, gamma));
  }
}

TEST(OptPert, MultiThresholdsMatchBruteForce) {
  PackingSet pk{Domain::interval01(), 0.1, {}};
  for (int j = 0; j < 8; ++j) pk.points.push_back({(j + 0.5) / 8});
  const auto c = build_multi_threshold_class(pk, 2);
  CounterRng rng(6);
  for (int inst = 0; inst < 20; ++inst) {
    Sequence s{Domain::interval01(), {}};
    for (int t = 0; t < 15; ++t) s.items.push_back({{rng.uniform()}, rng.rademacher()});
    const double gamma = 0.02;
    double best = 1e18;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        const std::vector<std::size_t> ch{a, b};
        const auto h = make_multi_threshold(c, ch);
        double v = 0;
        for (const auto& p : s.items) {
          bool wrong = false;
          for (int k = 0; k <= 4000 && !wrong; ++k) wrong = label(h, p.x[0] - gamma + 2 * gamma * k / 4000.0) != p.y;
          v += wrong;
        }
        best = std::min(best, v);
      }
    EXPECT_EQ(opt_pert(s, c, gamma).value, best);
  }
}

TEST(OptGauss, WorkedExamples) {
  // A point sitting on theta has smoothed value 0, so it always costs 1 there.
  const auto s = seq1d({{0.5, 1}});
  const auto v = opt_gauss(s, HypothesisClass::thresholds(), 0.3, 0.2);
  EXPECT_EQ(v.value, 0.0);  // theta = 0 gives margin 0.5 > 0.3 Phi^-1(0.6)
  EXPECT_EQ(gauss_loss_threshold(0.5, 0.5, 1, 0.3, 1e-9), 1);

  Sequence h{Domain::ball(2, Norm::l2, 1.0), {{{0.6, 0.0}, 1}}};
  EXPECT_EQ(opt_gauss(h, HypothesisClass::halfspaces(2), 0.5, 0.4).value, 0.0);
}

TEST(OptGauss, ClosedFormAgreesWithMonteCarlo) {
  CounterRng rng(7);
  for (int inst = 0; inst < 20; ++inst) {
    const double th = rng.uniform(), x = rng.uniform(), sigma = 0.3;
    double s = 0;
    const int m = 1'000'000;
    for (int k = 0; k < m; ++k) s += x + sigma * rng.normal() > th ? 1 : -1;
    EXPECT_NEAR(s / m, threshold_smoothed(th, x, sigma), 3e-3);
  }
}

TEST(OptGauss, ThresholdsMatchBruteForce) {
  CounterRng rng(8);
  for (int inst = 0; inst < 30; ++inst) {
    const auto s = random_threshold_seq(rng, 1 + rng.below(30), 0.2);
    EXPECT_EQ(opt_gauss(s, HypothesisClass::thresholds(), 0.3, 0.2).value, brute_gauss_thresholds(s, 0.3, 0.2));
  }
}

TEST(OptMargin, SmoothedThresholdExample) {
  const auto s = seq1d({{1.0, 1}});
  const auto f = HypothesisClass::thresholds().smoothed(1.0);
  const double v = 2 * oracle::phi(1.0) - 1;
  EXPECT_NEAR(v, 0.6827, 1e-4);
  EXPECT_EQ(opt_margin(s, f, v - 1e-6).value, 0.0);
  EXPECT_EQ(opt_margin(s, f, v + 1e-6).value, 1.0);
  EXPECT_THROW(opt_margin(s, HypothesisClass::thresholds(), 0.1), Error);
}

TEST(OptMargin, GammaZeroCorrectPoint) {
  Sequence h{Domain::ball(2, Norm::l2, 1.0), {{{0.3, 0.0}, 1}}};
  EXPECT_EQ(opt_margin(h, HypothesisClass::halfspaces(2), 0.0).value, 0.0);
}

TEST(Equivalence, ThreeBenchmarksAgreeOnRandomSequences) {
  CounterRng rng(9);
  const double gamma = gauss_margin(0.5, 0.4);
  for (int inst = 0; inst < 50; ++inst) {
    const auto s = random_disc_seq(rng, 20, 0.2);
    const auto r = check_halfspace_equivalence(s, 2, gamma, 0.5, 0.4);
    EXPECT_TRUE(r.equal()) << r.margin << " " << r.pert << " " << r.gauss;
  }
}

TEST(Equivalence, EmptyAndBoundary) {
  const double gamma = gauss_margin(0.5, 0.4);
  const auto e = check_halfspace_equivalence(Sequence{Domain::ball(2, Norm::l2, 1.0), {}}, 2, gamma, 0.5, 0.4);
  EXPECT_EQ(e.margin, 0.0);
  EXPECT_TRUE(e.equal());
  Sequence s{Domain::ball(2, Norm::l2, 1.0), {{{gamma, 0.0}, 1}}};
  const auto b = check_halfspace_equivalence(s, 2, gamma, 0.5, 0.4);
  EXPECT_EQ(b.margin, 1.0);
  EXPECT_TRUE(b.equal());
  EXPECT_THROW(check_halfspace_equivalence(s, 2, 0.3, 0.5, 0.4), Error);
}

TEST(Hinge, Examples) {
  Sequence s{Domain::ball(2, Norm::l2, 1.0), {{{1.0, 0.0}, 1}}};
  EXPECT_NEAR(opt_hinge(s, 2, 0.5).value, 0.0, 1e-12);
  // Contribution of w = (0,1) is max(0, 0.5 - 0)/0.5 = 1.
  EXPECT_DOUBLE_EQ(std::max(0.0, 0.5 - dot(Point{0.0, 1.0}, s.items[0].x)) / 0.5, 1.0);
  Sequence sep{Domain::ball(2, Norm::l2, 1.0), {}};
  CounterRng rng(10);
  for (int i = 0; i < 30; ++i) {
    const double y = rng.uniform(-0.5, 0.5);
    sep.items.push_back({{0.6, y}, 1});
    sep.items.push_back({{-0.6, y}, -1});
  }
  EXPECT_NEAR(opt_hinge(sep, 2, 0.5).value, 0.0, 1e-12);
}

TEST(Hinge, DominatesZeroMarginCount) {
  CounterRng rng(11);
  for (int inst = 0; inst < 20; ++inst) {
    const auto s = random_disc_seq(rng, 15, 0.3);
    EXPECT_GE(opt_hinge(s, 2, 0.3).value + 1e-9, opt_margin(s, HypothesisClass::halfspaces(2), 0.0).value);
  }
}

TEST(GaussComparison, RandomSequencesAndRealizable) {
  CounterRng rng(12);
  const auto c = HypothesisClass::thresholds();
  for (int inst = 0; inst < 50; ++inst) {
    const auto s = random_threshold_seq(rng, 30, 0.2);
    EXPECT_TRUE(check_gauss_comparison(s, c, 0.3, 0.2).holds);
  }
  // Realizable with a wide gap: OPT~ is tiny, OPT_gauss <= 2 OPT~ + 1/T.
  Sequence s{Domain::interval01(), {}};
  for (int t = 0; t < 30; ++t) s.items.push_back({{t % 2 ? 0.95 : 0.05}, t % 2 ? 1 : -1});
  const auto r = check_gauss_comparison(s, c, 0.1, 1.0 / 900.0);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.opt_gauss, 2 * r.opt_smoothed + 1.0 / 30.0 + 1e-12);
}

TEST(SmoothedError, MatchesDenseScan) {
  CounterRng rng(13);
  for (int inst = 0; inst < 10; ++inst) {
    const auto s = random_threshold_seq(rng, 25, 0.2);
    double best = 1e18;
    for (int k = 0; k <= 100'000; ++k) {
      const double th = k / 100'000.0;
      double v = 0;
      for (const auto& p : s.items) v += oracle::phi(-p.y * (p.x[0] - th) / 0.3);
      best = std::min(best, v);
    }
    EXPECT_NEAR(opt_smoothed_error(s, HypothesisClass::thresholds(), 0.3).value, best, 1e-6);
  }
}

TEST(Json, BenchmarkValueFields) {
  const auto b = opt_pert(seq1d({{0.2, -1}, {0.8, 1}}), HypothesisClass::thresholds(), 0.25);
  const nlohmann::json j = b;
  EXPECT_EQ(j.at("value").get<double>(), 0.0);
  EXPECT_EQ(j.at("kind").get<std::string>(), "pert");
  EXPECT_TRUE(j.contains("witness"));
}
