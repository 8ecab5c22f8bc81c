#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "relaxed/adversary.hpp"
#include "relaxed/learners.hpp"

using namespace relaxed;

namespace {

template <class T>
T& as(std::unique_ptr<OnlineLearner>& p) {
  auto* q = dynamic_cast<T*>(p.get());
  if (!q) throw std::runtime_error("unexpected learner type");
  return *q;
}

CoverSet cover_of(std::vector<double> xs) {
  CoverSet c;
  c.domain = Domain::interval01();
  c.scale = 0.01;
  for (double x : xs) c.points.push_back({x});
  return c;
}

}  // namespace

TEST(Perturbation, ExpertCountsAndEta) {
  auto l = make_perturbation_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.25, 100, 1);
  auto& p = as<PerturbationLearner>(l);
  EXPECT_EQ(p.experts().size(), 3u);
  EXPECT_NEAR(p.weights().eta, std::sqrt(8.0 * std::log(3.0) / 100.0), 1e-15);
  EXPECT_NEAR(l->ln_experts(), std::log(3.0), 1e-15);

  auto l2 = make_perturbation_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.5, 100, 1);
  EXPECT_EQ(as<PerturbationLearner>(l2).experts().size(), 2u);
  EXPECT_THROW(make_perturbation_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.0, 100, 1), Error);
}

TEST(Perturbation, ConcentratesOnConsistentExpert) {
  // Points at 0.1 / 0.9 labelled by theta = 0.5: exactly one of the three
  // experts on Z = {0.25, 0.75} is never wrong.
  auto l = make_perturbation_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.25, 400, 2);
  for (int t = 0; t < 400; ++t) l->round({t % 2 ? 0.9 : 0.1}, t % 2 ? 1 : -1);
  const auto probs = as<PerturbationLearner>(l).weights().probabilities();
  EXPECT_GT(*std::max_element(probs.begin(), probs.end()), 0.999);
  const double eta = std::sqrt(8.0 * std::log(3.0) / 400.0);
  EXPECT_LE(l->cumulative_expected_loss(), mw_loss_bound(eta, 0.0, std::log(3.0)) + 1e-9);
}

TEST(Perturbation, FactoredMatchesFlatMwRoundByRound) {
  PackingSet pk{Domain::interval01(), 0.05, {}};
  for (int j = 0; j < 12; ++j) pk.points.push_back({(j + 0.5) / 12});
  const auto c = build_multi_threshold_class(pk, 3);
  const double gamma = 0.02;
  const std::size_t horizon = 300;
  auto l = make_perturbation_learner(c, Domain::interval01(), gamma, horizon, 3);
  ASSERT_NE(dynamic_cast<FactoredPerturbationLearner*>(l.get()), nullptr);

  // Reference: plain-weight MW over the flat projection on the same cover.
  const auto cover = build_cover(Domain::interval01(), gamma);
  const auto flat = project_class(c, cover.points);
  const std::size_t n = flat.size();
  const double eta = default_eta(std::log(static_cast<double>(n)), horizon);
  std::vector<double> cum(n, 0.0);
  CounterRng rng(4);
  for (std::size_t t = 0; t < horizon; ++t) {
    const Point x{rng.uniform()};
    const int y = rng.rademacher();
    const std::size_t z = project_point(cover, x).index;
    std::vector<double> w(n);
    for (std::size_t e = 0; e < n; ++e) w[e] = std::exp(-eta * cum[e]);
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    double want = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      const double loss = flat.label(e, z) != y;
      want += w[e] / s * loss;
      cum[e] += loss;
    }
    EXPECT_NEAR(l->round(x, y).expected_loss, want, 1e-9) << t;
  }
}

TEST(Perturbation, DeterministicPerSeed) {
  auto a = make_perturbation_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.05, 200, 7);
  auto b = make_perturbation_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.05, 200, 7);
  CounterRng rng(8);
  for (int t = 0; t < 200; ++t) {
    const Point x{rng.uniform()};
    const int y = rng.rademacher();
    EXPECT_EQ(a->round(x, y).y_hat, b->round(x, y).y_hat);
  }
  EXPECT_EQ(a->cumulative_mistakes(), b->cumulative_mistakes());
}

TEST(Learner, RejectsBadLabel) {
  Perceptron p(1);
  EXPECT_THROW(p.round({0.5}, 0), Error);
}

TEST(Gaussian, SetupParameters) {
  auto g = make_gaussian_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.3, 0.4, 100, 5);
  const auto& s = g->setup();
  EXPECT_DOUBLE_EQ(s.eps_tilde, 0.1);
  EXPECT_NEAR(s.gamma, 0.3 * 0.1 / std::sqrt(2.0 / std::numbers::pi), 1e-15);
  EXPECT_EQ(s.samples_per_point, 800u);
  EXPECT_EQ(g->cover().size(), static_cast<std::size_t>(std::ceil(1.0 / (2.0 * s.gamma))));
  ASSERT_EQ(s.audit.size(), g->cover().size());
  for (double a : s.audit) EXPECT_LE(a, 0.1);
}

TEST(Gaussian, VotesTrackSmoothedProbability) {
  auto g = make_gaussian_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.3, 0.4, 100, 6);
  const auto& s = g->setup();
  for (std::size_t e = 0; e < g->experts().size(); ++e) {
    const double th = std::get<Threshold>(g->experts().witness(e)).theta;
    for (std::size_t k = 0; k < g->cover().size(); ++k) {
      const double frac = static_cast<double>(g->votes(e, k)) / s.samples_per_point;
      const double want = oracle::phi((g->cover().points[k][0] - th) / 0.3);
      EXPECT_LE(std::abs(frac - want), s.eps_tilde + 1e-12);
    }
  }
}

TEST(Gaussian, Errors) {
  PackingSet pk{Domain::interval01(), 0.1, {{0.25}, {0.75}}};
  EXPECT_THROW(make_gaussian_learner(build_multi_threshold_class(pk, 1), Domain::interval01(), 0.3, 0.4, 10, 1), Error);
  try {
    make_gaussian_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.01, 0.05, 10, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource);
  }
  EXPECT_THROW(make_gaussian_learner(HypothesisClass::thresholds(), Domain::interval01(), 0.0, 0.4, 10, 1), Error);
}

TEST(Margin, CoverSizeAndG0) {
  const auto f = HypothesisClass::thresholds().smoothed(0.1);
  auto m = make_margin_learner(f, 0.2, 100, CoverMode::g0, 1);
  EXPECT_EQ(m->cover().size(), 40u);
  EXPECT_LE(m->values().size(), 41u);
  EXPECT_NEAR(m->lipschitz(), std::sqrt(2.0 / std::numbers::pi) / 0.1, 1e-12);
  for (const auto& v : m->values())
    for (double a : v) EXPECT_TRUE(a == 1.0 || a == -1.0);
  EXPECT_THROW(make_margin_learner(HypothesisClass::thresholds(), 0.2, 100, CoverMode::g0, 1), Error);
  EXPECT_THROW(make_margin_learner(f, 1.5, 100, CoverMode::g0, 1), Error);
}

TEST(Margin, QuantizedCoverWithinHalfPitch) {
  const double sigma = 0.1, gamma = 0.2;
  const auto z = build_interval_cover(gamma / (2.0 * lipschitz_constant(sigma)));
  const auto q = build_quantized_cover(z, sigma, gamma);
  EXPECT_DOUBLE_EQ(q.pitch, 0.05);
  std::vector<double> thetas;
  CounterRng rng(9);
  for (int i = 0; i < 5000; ++i) thetas.push_back(rng.uniform());
  for (int i = 0; i <= 2000; ++i) thetas.push_back(i / 2000.0);
  const auto a = audit_quantized_cover(q, z, sigma, thetas);
  EXPECT_TRUE(a.pass);
  // Nearest-grid rounding: error at most half a pitch.
  EXPECT_LE(a.worst, gamma / 8.0 + 1e-12);
  // Every stored element is on the grid.
  for (const auto& v : q.values)
    for (double x : v) EXPECT_NEAR(std::remainder(x + 1.0, q.pitch), 0.0, 1e-12);
  auto m = make_margin_learner(HypothesisClass::thresholds().smoothed(sigma), gamma, 100, CoverMode::gquarter, 1);
  EXPECT_EQ(m->values().size(), q.values.size());
  EXPECT_EQ(m->name(), "margin_Gquarter");
}

TEST(Margin, ParseCoverMode) {
  EXPECT_EQ(parse_cover_mode("G0"), CoverMode::g0);
  EXPECT_EQ(parse_cover_mode("gquarter"), CoverMode::gquarter);
  EXPECT_THROW(parse_cover_mode("G1"), Error);
}

TEST(HalfspaceCover, ExpertCounts) {
  auto h1 = make_halfspace_learner(1, Norm::l2, 1.0, 0.1, 100, 1);
  EXPECT_EQ(h1->dual_cover().size(), 2u);
  auto h2 = make_halfspace_learner(2, Norm::l2, 1.0, 0.1, 100, 1);
  EXPECT_DOUBLE_EQ(h2->beta(), 0.1);
  EXPECT_LE(std::log(static_cast<double>(h2->dual_cover().size())),
            2.0 * std::log(1.0 + 2.0 / 0.1) + h2->dual_cover().log_constant);
  EXPECT_THROW(make_halfspace_learner(2, Norm::l2, 1.0, 1.0, 100, 1), Error);
  EXPECT_THROW(h2->round({0.1}, 1), Error);
}

TEST(HalfspaceCover, FewMistakesOnMarginStream) {
  RealizableSpec s;
  s.kind = StreamKind::realizable_margin;
  s.cls = HypothesisClass::halfspaces(2);
  s.domain = Domain::ball(2, Norm::l2, 1.0);
  s.gamma = 0.1;
  const auto g = gen_realizable(s, 500, 10);
  auto h = make_halfspace_learner(2, Norm::l2, 1.0, 0.1, 500, 10);
  for (const auto& p : g.seq.items) h->round(p.x, p.y);
  const double eta = default_eta(h->ln_experts(), 500);
  EXPECT_LE(h->cumulative_expected_loss(), mw_loss_bound(eta, 0.0, h->ln_experts()) + 1e-9);
}

TEST(Perceptron, HandExamples) {
  Perceptron p(2);
  EXPECT_EQ(p.round({1.0, 0.0}, 1).y_hat, 1);  // w = 0 ties to +1
  EXPECT_EQ(p.weights(), (Point{0.0, 0.0}));
  Perceptron q(2);
  q.round({1.0, 0.0}, -1);
  EXPECT_EQ(q.weights(), (Point{-1.0, 0.0}));
  EXPECT_EQ(q.cumulative_mistakes(), 1u);
}

TEST(Perceptron, MistakeBoundOnSeparableData) {
  CounterRng rng(11);
  for (int inst = 0; inst < 20; ++inst) {
    const double a = rng.uniform(0, 2 * std::numbers::pi), gamma = 0.15;
    const Point w{std::cos(a), std::sin(a)};
    Perceptron p(2);
    double r = 0;
    for (int t = 0; t < 1000; ++t) {
      Point x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double m = dot(w, x);
      if (std::abs(m) <= gamma || x[0] * x[0] + x[1] * x[1] > 1) continue;
      r = std::max(r, std::hypot(x[0], x[1]));
      p.round(x, m > 0 ? 1 : -1);
    }
    EXPECT_LE(static_cast<double>(p.cumulative_mistakes()), (r / gamma) * (r / gamma));
  }
}

TEST(Halving, SingleExpertNeverErs) {
  const auto cover = cover_of({0.2, 0.8});
  FiniteExpertClass f(cover.points, "one");
  f.insert_hypothesis(Threshold{0.5});
  Halving h(cover, f);
  for (int t = 0; t < 50; ++t) h.round({t % 2 ? 0.8 : 0.2}, t % 2 ? 1 : -1);
  EXPECT_EQ(h.cumulative_mistakes(), 0u);
  EXPECT_THROW(h.round({0.2}, 1), Error);  // inconsistent label empties the version space
}

TEST(Halving, ExhaustiveThreeBehavioursAtMostOneMistake) {
  const auto cover = cover_of({0.25, 0.75});
  const auto f = project_class(HypothesisClass::thresholds(), cover.points);
  ASSERT_EQ(f.size(), 3u);
  std::size_t worst = 0;
  for (std::size_t b = 0; b < 3; ++b)
    for (unsigned mask = 0; mask < 1024; ++mask) {
      Halving h(cover, f);
      for (int t = 0; t < 10; ++t) {
        const std::size_t j = (mask >> t) & 1;
        h.round(cover.points[j], f.label(b, j));
      }
      worst = std::max(worst, h.cumulative_mistakes());
    }
  EXPECT_EQ(worst, 1u);
}

TEST(Halving, BisectionAdversaryForcesExactlyLog2Mistakes) {
  for (int k = 1; k <= 6; ++k) {
    const int m = (1 << k) - 1;
    std::vector<double> xs;
    for (int j = 0; j < m; ++j) xs.push_back((j + 0.5) / m);
    const auto cover = cover_of(xs);
    const auto f = project_class(HypothesisClass::thresholds(), cover.points);
    ASSERT_EQ(f.size(), static_cast<std::size_t>(m + 1));
    Halving h(cover, f);
    // Alive thresholds are the pattern counts c in [lo, hi]; point j is +1 iff j >= c.
    int lo = 0, hi = m;
    while (lo < hi) {
      const int j = lo + (hi - lo + 1) / 2 - 1;
      const int pred = h.predict_index(static_cast<std::size_t>(j));
      const int y = -pred;
      h.round(cover.points[static_cast<std::size_t>(j)], y);
      if (y > 0) hi = j;
      else lo = j + 1;
    }
    EXPECT_EQ(h.cumulative_mistakes(), static_cast<std::size_t>(k));
    EXPECT_EQ(h.alive(), 1u);
  }
}

TEST(Halving, FactoredMistakesBoundedOnRobustStream) {
  PackingSet pk{Domain::interval01(), 0.05, {}};
  for (int j = 0; j < 16; ++j) pk.points.push_back({(j + 0.5) / 16});
  const auto c = build_multi_threshold_class(pk, 2);
  const double gamma = 0.005;
  const auto cover = build_cover(Domain::interval01(), gamma);
  FactoredHalving h(cover, project_factored(c, cover.points));
  const double start = h.alive();
  const std::vector<std::size_t> choice{3, 5};
  const auto target = make_multi_threshold(c, choice);
  CounterRng rng(12);
  int seen = 0;
  while (seen < 400) {
    const double x = rng.uniform();
    if (pert_loss_multi(target, x, label(target, x), 2 * gamma) != 0) continue;
    h.round({x}, label(target, x));
    ++seen;
  }
  EXPECT_LE(static_cast<double>(h.cumulative_mistakes()), std::log2(start));
  EXPECT_GE(h.alive(), 1.0);
}
