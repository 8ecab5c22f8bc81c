#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relaxed/error.hpp"
#include "relaxed/gaussian.hpp"
#include "relaxed/hypothesis.hpp"
#include "relaxed/metric_cover.hpp"
#include "relaxed/mw_core.hpp"
#include "relaxed/rng.hpp"

namespace relaxed {

struct RoundRecord {
  std::size_t t = 0;
  Point x;
  int y_true = 1;
  int y_hat = 1;
  double expected_loss = 0.0;
  double cumulative_expected_loss = 0.0;
  std::size_t cumulative_sampled_mistakes = 0;
};

/// Uniform online protocol: see x, predict, see y, update. Subclasses implement
/// predict/update; round() keeps the running totals.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;
  /// Natural log of the expert-set size (0 for non-expert learners).
  virtual double ln_experts() const { return 0.0; }
  virtual double num_experts() const { return std::exp(ln_experts()); }

  RoundRecord round(const Point& x, int y) {
    if (y != 1 && y != -1) throw Error(ErrorKind::invalid_parameter, "labels must be +-1");
    const int y_hat = predict(x);
    const double loss = update(y);
    RoundRecord r;
    r.t = ++t_;
    r.x = x;
    r.y_true = y;
    r.y_hat = y_hat;
    r.expected_loss = loss;
    cum_loss_ += loss;
    if (y_hat != y) ++mistakes_;
    r.cumulative_expected_loss = cum_loss_;
    r.cumulative_sampled_mistakes = mistakes_;
    return r;
  }

  double cumulative_expected_loss() const { return cum_loss_; }
  std::size_t cumulative_mistakes() const { return mistakes_; }
  std::size_t rounds() const { return t_; }

 protected:
  /// Returns the (possibly randomised) prediction for x; must not depend on y.
  virtual int predict(const Point& x) = 0;
  /// Reveals y for the last predicted x; returns the round's expected loss.
  virtual double update(int y) = 0;

 private:
  std::size_t t_ = 0;
  double cum_loss_ = 0.0;
  std::size_t mistakes_ = 0;
};

// Multiplicative Weights over cover-projected experts ---------------------------

/// Labels of a flat expert set at the current cover index; shared by the
/// perturbation and margin learners.
class FlatMwLearner : public OnlineLearner {
 public:
  double ln_experts() const override { return std::log(static_cast<double>(state_.size())); }
  const WeightState& weights() const { return state_; }

 protected:
  FlatMwLearner(std::size_t experts, std::size_t horizon, std::uint64_t seed)
      : rng_(seed, 0x6d77ULL), state_(init_state(experts, horizon)), losses_(experts) {}

  static WeightState init_state(std::size_t experts, std::size_t horizon) {
    if (experts == 0) throw Error(ErrorKind::empty_expert_set, "MW needs at least one expert");
    return mw_init(experts, default_eta(std::log(static_cast<double>(experts)), horizon));
  }

  /// Expert e's label at the projected point for this round.
  virtual int expert_label(std::size_t e) const = 0;
  /// MW loss of expert e given y.
  virtual double expert_loss(std::size_t e, int y) const { return expert_label(e) != y ? 1.0 : 0.0; }

  int sample_prediction() {
    probs_ = state_.probabilities();
    return expert_label(sample_index(probs_, rng_));
  }

  double update(int y) override {
    double e = 0.0;
    for (std::size_t i = 0; i < losses_.size(); ++i) {
      losses_[i] = expert_loss(i, y);
      e += probs_[i] * losses_[i];
    }
    mw_update_in_place(state_, losses_);
    return e;
  }

  CounterRng rng_;
  WeightState state_;
  std::vector<double> losses_;
  std::vector<double> probs_;
};

/// MW over the projection of H onto a gamma-cover Z, played at phi(x).
class PerturbationLearner final : public FlatMwLearner {
 public:
  PerturbationLearner(CoverSet cover, FiniteExpertClass experts, std::size_t horizon, std::uint64_t seed)
      : FlatMwLearner(experts.size(), horizon, seed), cover_(std::move(cover)), experts_(std::move(experts)) {}

  std::string name() const override { return "perturbation"; }
  const CoverSet& cover() const { return cover_; }
  const FiniteExpertClass& experts() const { return experts_; }

 protected:
  int predict(const Point& x) override {
    z_ = project_point(cover_, x).index;
    return sample_prediction();
  }
  int expert_label(std::size_t e) const override { return experts_.label(e, z_); }

 private:
  CoverSet cover_;
  FiniteExpertClass experts_;
  std::size_t z_ = 0;
};

/// The perturbation learner on a multi-threshold class with the product expert set kept
/// factored: each block runs its own MW and only the block owning phi(x) moves.
/// The product of the block distributions equals flat MW on the product set.
class FactoredPerturbationLearner final : public OnlineLearner {
 public:
  FactoredPerturbationLearner(CoverSet cover, FactoredExpertClass experts, std::size_t horizon,
                              std::uint64_t seed)
      : cover_(std::move(cover)), experts_(std::move(experts)), rng_(seed, 0x6d77ULL) {
    local_index_.assign(experts_.ground_set.size(), 0);
    for (const auto& b : experts_.blocks) {
      if (b.thetas.empty()) throw Error(ErrorKind::empty_expert_set, "empty block");
      for (std::size_t k = 0; k < b.points.size(); ++k) local_index_[b.points[k]] = k;
      ln_n_ += std::log(static_cast<double>(b.thetas.size()));
    }
    const double eta = default_eta(ln_n_, horizon);
    for (const auto& b : experts_.blocks) states_.push_back(mw_init(b.thetas.size(), eta));
  }

  std::string name() const override { return "perturbation_factored"; }
  double ln_experts() const override { return ln_n_; }
  const CoverSet& cover() const { return cover_; }
  const FactoredExpertClass& experts() const { return experts_; }

  /// Marginal distribution of block i.
  std::vector<double> block_probabilities(std::size_t i) const { return states_[i].probabilities(); }

 protected:
  int predict(const Point& x) override {
    z_ = project_point(cover_, x).index;
    block_ = experts_.owner[z_];
    if (block_ < 0) return -1;
    probs_ = states_[static_cast<std::size_t>(block_)].probabilities();
    const std::size_t e = sample_index(probs_, rng_);
    return experts_.blocks[static_cast<std::size_t>(block_)].labels[e][local_index_[z_]];
  }

  double update(int y) override {
    if (block_ < 0) return y == -1 ? 0.0 : 1.0;  // every product expert says -1 here
    const auto& b = experts_.blocks[static_cast<std::size_t>(block_)];
    losses_.resize(b.thetas.size());
    double e = 0.0;
    for (std::size_t i = 0; i < losses_.size(); ++i) {
      losses_[i] = b.labels[i][local_index_[z_]] != y ? 1.0 : 0.0;
      e += probs_[i] * losses_[i];
    }
    mw_update_in_place(states_[static_cast<std::size_t>(block_)], losses_);
    return e;
  }

 private:
  CoverSet cover_;
  FactoredExpertClass experts_;
  CounterRng rng_;
  std::vector<WeightState> states_;
  std::vector<std::size_t> local_index_;
  double ln_n_ = 0.0;
  std::size_t z_ = 0;
  int block_ = -1;
  std::vector<double> probs_, losses_;
};

inline std::unique_ptr<OnlineLearner> make_perturbation_learner(const HypothesisClass& c, const Domain& domain,
                                                                double gamma, std::size_t horizon,
                                                                std::uint64_t seed) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_scale, "gamma must be > 0");
  auto cover = build_cover(domain, gamma);
  if (c.kind == HypothesisClass::Kind::multi_thresholds) {
    auto f = project_factored(c, cover.points);
    return std::make_unique<FactoredPerturbationLearner>(std::move(cover), std::move(f), horizon, seed);
  }
  auto experts = project_class(c, cover.points);
  return std::make_unique<PerturbationLearner>(std::move(cover), std::move(experts), horizon, seed);
}

// Gaussian learner -------------------------------------------------------------------

struct GaussianLearnerOptions {
  double sample_constant = 8.0;          // M = ceil(c vc / eps~^2)
  std::size_t max_ground_points = 60'000; // cap on |Z| * M
  int max_doublings = 3;
};

/// Largest deviation between empirical and true error probabilities over a
/// family, per cover point. Thresholds use the exact KS supremum.
inline double approximation_error(const HypothesisClass& c, const NoiseBank& bank, std::uint64_t seed) {
  if (c.kind == HypothesisClass::Kind::thresholds01) return bank.ks_statistic();
  // Halfspaces: 10^3 random directions; Pr[<w, z> <= t] for the bank vs Phi.
  CounterRng rng(seed, 0x61756469ULL);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Point w = sample_unit_sphere(c.dim, Norm::l2, rng);
    const double t = rng.uniform(-3.0, 3.0);
    std::size_t below = 0;
    for (std::size_t i = 0; i < bank.size(); ++i) below += dot(w, bank.row(i)) <= t;
    worst = std::max(worst, std::abs(static_cast<double>(below) / static_cast<double>(bank.size()) - phi(t)));
  }
  return worst;
}

class GaussianLearner final : public FlatMwLearner {
 public:
  struct Setup {
    double eps_tilde = 0.0;
    double gamma = 0.0;
    std::size_t samples_per_point = 0;
    std::vector<double> audit;  // approximation error per cover point
    int doublings = 0;
  };

  GaussianLearner(CoverSet cover, FiniteExpertClass experts, std::vector<std::vector<std::uint32_t>> votes,
                  Setup setup, std::size_t horizon, std::uint64_t seed)
      : FlatMwLearner(experts.size(), horizon, seed),
        cover_(std::move(cover)),
        experts_(std::move(experts)),
        votes_(std::move(votes)),
        setup_(std::move(setup)) {}

  std::string name() const override { return "gaussian"; }
  const CoverSet& cover() const { return cover_; }
  const FiniteExpertClass& experts() const { return experts_; }
  const Setup& setup() const { return setup_; }
  /// #{i : h_e(z_k + sigma z_i) = +1}.
  std::uint32_t votes(std::size_t e, std::size_t k) const { return votes_[e][k]; }

 protected:
  int predict(const Point& x) override {
    z_ = project_point(cover_, x).index;
    return sample_prediction();
  }
  int expert_label(std::size_t e) const override {
    return 2 * votes_[e][z_] >= setup_.samples_per_point ? 1 : -1;
  }
  /// 1[fraction of noisy evaluations disagreeing with y >= 1/2].
  double expert_loss(std::size_t e, int y) const override {
    const std::size_t plus = votes_[e][z_];
    const std::size_t wrong = y > 0 ? setup_.samples_per_point - plus : plus;
    return 2 * wrong >= setup_.samples_per_point ? 1.0 : 0.0;
  }

 private:
  CoverSet cover_;
  FiniteExpertClass experts_;
  std::vector<std::vector<std::uint32_t>> votes_;
  Setup setup_;
  std::size_t z_ = 0;
};

inline std::unique_ptr<GaussianLearner> make_gaussian_learner(const HypothesisClass& c, const Domain& domain,
                                                              double sigma, double eps, std::size_t horizon,
                                                              std::uint64_t seed,
                                                              GaussianLearnerOptions opt = {}) {
  if (!(sigma > 0.0) || !(eps > 0.0)) throw Error(ErrorKind::invalid_parameter, "need sigma, eps > 0");
  if (c.kind == HypothesisClass::Kind::multi_thresholds)
    throw Error(ErrorKind::unsupported, "the Gaussian learner supports thresholds and halfspaces");
  GaussianLearner::Setup s;
  s.eps_tilde = eps / 4.0;
  s.gamma = sigma * s.eps_tilde / std::sqrt(2.0 / std::numbers::pi);
  auto cover = build_cover(domain, s.gamma);
  const std::size_t d = static_cast<std::size_t>(domain.dim);
  std::size_t m = static_cast<std::size_t>(
      std::ceil(opt.sample_constant * vc_dimension(c) / (s.eps_tilde * s.eps_tilde) - 1e-9));

  std::vector<NoiseBank> banks;
  for (;; ++s.doublings) {
    if (m * cover.size() > opt.max_ground_points)
      throw Error(ErrorKind::resource, "noise bank of " + std::to_string(m * cover.size()) +
                                           " points exceeds the cap; raise epsilon or sigma");
    banks.clear();
    s.audit.clear();
    bool ok = true;
    for (std::size_t k = 0; k < cover.size(); ++k) {
      banks.emplace_back(sigma, m, d, splitmix64(seed ^ splitmix64(k + 1)));
      s.audit.push_back(approximation_error(c, banks.back(), seed + k));
      ok = ok && s.audit.back() <= s.eps_tilde;
    }
    if (ok) break;
    if (s.doublings == opt.max_doublings)
      throw Error(ErrorKind::construction_failure, "noise banks failed the eps~ approximation audit");
    m *= 2;
  }
  s.samples_per_point = m;

  // S = union over cover points of z_k + sigma z_i, laid out point-major.
  std::vector<Point> ground;
  ground.reserve(m * cover.size());
  for (std::size_t k = 0; k < cover.size(); ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      Point p = cover.points[k];
      const auto z = banks[k].row(i);
      for (std::size_t j = 0; j < d; ++j) p[j] += sigma * z[j];
      ground.push_back(std::move(p));
    }
  }
  auto experts = project_class(c, ground);
  std::vector<std::vector<std::uint32_t>> votes(experts.size(), std::vector<std::uint32_t>(cover.size(), 0));
  for (std::size_t e = 0; e < experts.size(); ++e) {
    const auto row = experts.row(e);
    for (std::size_t k = 0; k < cover.size(); ++k) {
      std::uint32_t cnt = 0;
      for (std::size_t j = k * m; j < (k + 1) * m; ++j) cnt += (row[j / 64] >> (j % 64)) & 1ULL;
      votes[e][k] = cnt;
    }
  }
  return std::make_unique<GaussianLearner>(std::move(cover), std::move(experts), std::move(votes), std::move(s),
                                           horizon, seed);
}

// Margin learner -------------------------------------------------------------------

enum class CoverMode { g0, gquarter };

inline const char* to_string(CoverMode m) { return m == CoverMode::g0 ? "G0" : "Gquarter"; }

inline CoverMode parse_cover_mode(const std::string& s) {
  if (s == "G0" || s == "g0") return CoverMode::g0;
  if (s == "Gquarter" || s == "gquarter") return CoverMode::gquarter;
  throw Error(ErrorKind::usage, "unknown cover mode '" + s + "'");
}

/// Value-quantised l_inf cover of the smoothed thresholds {theta in [0,1]} on Z.
struct QuantizedCover {
  double pitch = 0.0;                       // gamma / 4
  std::vector<std::vector<double>> values;  // one vector over Z per cover element
  std::vector<double> thetas;               // a member quantising to each element
};

inline int quantize_index(double v, double pitch) { return static_cast<int>(std::lround((v + 1.0) / pitch)); }

inline std::vector<double> smoothed_threshold_vector(const CoverSet& z, double theta, double sigma) {
  std::vector<double> v(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) v[k] = threshold_smoothed(theta, z.points[k][0], sigma);
  return v;
}

/// Each member's value vector is rounded to the grid {-1 + j gamma/4}; the
/// rounding changes only where some coordinate crosses a cell boundary, so the
/// boundaries' theta-preimages, their midpoints and 0, 1 enumerate all cells.
inline QuantizedCover build_quantized_cover(const CoverSet& z, double sigma, double gamma) {
  QuantizedCover q;
  q.pitch = gamma / 4.0;
  std::vector<double> cand{0.0, 1.0};
  const int levels = static_cast<int>(std::floor(2.0 / q.pitch + 1e-9));
  for (int j = 0; j < levels; ++j) {
    const double b = -1.0 + (j + 0.5) * q.pitch;
    if (b <= -1.0 || b >= 1.0) continue;
    const double off = sigma * phi_inv(0.5 * (1.0 - b));
    for (const auto& p : z.points) {
      const double th = p[0] + off;
      if (th > 0.0 && th < 1.0) cand.push_back(th);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const std::size_t n = cand.size();
  for (std::size_t i = 0; i + 1 < n; ++i) cand.push_back(0.5 * (cand[i] + cand[i + 1]));
  std::set<std::vector<int>> seen;
  for (double th : cand) {
    const auto v = smoothed_threshold_vector(z, th, sigma);
    std::vector<int> key(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) key[k] = quantize_index(v[k], q.pitch);
    if (!seen.insert(key).second) continue;
    std::vector<double> g(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) g[k] = std::clamp(-1.0 + key[k] * q.pitch, -1.0, 1.0);
    q.values.push_back(std::move(g));
    q.thetas.push_back(th);
  }
  return q;
}

struct QuantizedAudit {
  std::size_t members = 0;
  double worst = 0.0;  // max over members of min over cover of l_inf distance on Z
  bool pass = false;
};

/// Checks every member theta in `thetas` is within gamma/4 of the cover.
inline QuantizedAudit audit_quantized_cover(const QuantizedCover& q, const CoverSet& z, double sigma,
                                            const std::vector<double>& thetas) {
  std::unordered_map<std::string, std::size_t> index;
  auto key_of = [&](const std::vector<double>& v) {
    std::string k;
    for (double a : v) k += std::to_string(quantize_index(a, q.pitch)) + ",";
    return k;
  };
  for (std::size_t i = 0; i < q.values.size(); ++i) index.emplace(key_of(q.values[i]), i);
  QuantizedAudit a;
  a.members = thetas.size();
  for (double th : thetas) {
    const auto v = smoothed_threshold_vector(z, th, sigma);
    auto dist = [&](std::size_t i) {
      double d = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) d = std::max(d, std::abs(v[k] - q.values[i][k]));
      return d;
    };
    double best = std::numeric_limits<double>::infinity();
    if (auto it = index.find(key_of(v)); it != index.end()) best = dist(it->second);
    if (best > q.pitch) {
      for (std::size_t i = 0; i < q.values.size(); ++i) best = std::min(best, dist(i));
    }
    a.worst = std::max(a.worst, best);
  }
  a.pass = a.worst <= q.pitch + 1e-12;
  return a;
}

/// Margin learner for sigma-smoothed thresholds: Z at scale gamma/(2L), MW over
/// G0 (sign patterns) or the quantised cover, loss 1[y g(z) <= 0].
class MarginLearner final : public FlatMwLearner {
 public:
  MarginLearner(CoverSet cover, std::vector<std::vector<double>> values, CoverMode mode, double lipschitz,
                std::size_t horizon, std::uint64_t seed)
      : FlatMwLearner(values.size(), horizon, seed),
        cover_(std::move(cover)),
        values_(std::move(values)),
        mode_(mode),
        lipschitz_(lipschitz) {}

  std::string name() const override { return std::string("margin_") + to_string(mode_); }
  const CoverSet& cover() const { return cover_; }
  CoverMode mode() const { return mode_; }
  double lipschitz() const { return lipschitz_; }
  const std::vector<std::vector<double>>& values() const { return values_; }

 protected:
  int predict(const Point& x) override {
    z_ = project_point(cover_, x).index;
    return sample_prediction();
  }
  int expert_label(std::size_t e) const override { return values_[e][z_] >= 0.0 ? 1 : -1; }
  double expert_loss(std::size_t e, int y) const override { return y * values_[e][z_] <= 0.0 ? 1.0 : 0.0; }

 private:
  CoverSet cover_;
  std::vector<std::vector<double>> values_;
  CoverMode mode_;
  double lipschitz_;
  std::size_t z_ = 0;
};

inline std::unique_ptr<MarginLearner> make_margin_learner(const HypothesisClass& f, double gamma,
                                                          std::size_t horizon, CoverMode mode,
                                                          std::uint64_t seed) {
  if (f.kind != HypothesisClass::Kind::thresholds01 || !f.sigma)
    throw Error(ErrorKind::unsupported, "the margin learner supports sigma-smoothed thresholds");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::invalid_scale, "gamma must lie in (0,1)");
  const double sigma = *f.sigma;
  const double lip = lipschitz_constant(sigma);
  auto cover = build_interval_cover(gamma / (2.0 * lip));
  std::vector<std::vector<double>> values;
  if (mode == CoverMode::g0) {
    const auto g0 = project_class(f, cover.points);
    for (std::size_t e = 0; e < g0.size(); ++e) {
      std::vector<double> v(cover.size());
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = g0.label(e, k);
      values.push_back(std::move(v));
    }
  } else {
    values = build_quantized_cover(cover, sigma, gamma).values;
  }
  return std::make_unique<MarginLearner>(std::move(cover), std::move(values), mode, lip, horizon, seed);
}

// Halfspace cover learner ------------------------------------------------------------

/// MW over h_w, w in a beta-cover (beta = gamma/B) of the dual unit sphere,
/// evaluated on raw x.
class HalfspaceCoverLearner final : public FlatMwLearner {
 public:
  HalfspaceCoverLearner(CoverSet dual_cover, double beta, std::size_t horizon, std::uint64_t seed)
      : FlatMwLearner(dual_cover.size(), horizon, seed), cover_(std::move(dual_cover)), beta_(beta) {}

  std::string name() const override { return "halfspace_cover"; }
  const CoverSet& dual_cover() const { return cover_; }
  double beta() const { return beta_; }

 protected:
  int predict(const Point& x) override {
    if (x.size() != cover_.points.front().size()) throw Error(ErrorKind::shape, "dimension mismatch");
    x_ = x;
    return sample_prediction();
  }
  int expert_label(std::size_t e) const override { return dot(cover_.points[e], x_) >= 0.0 ? 1 : -1; }

 private:
  CoverSet cover_;
  double beta_;
  Point x_;
};

inline std::unique_ptr<HalfspaceCoverLearner> make_halfspace_learner(int d, Norm p, double radius, double gamma,
                                                                     std::size_t horizon, std::uint64_t seed) {
  if (d < 1 || !(radius > 0.0) || !(gamma > 0.0 && gamma < radius))
    throw Error(ErrorKind::invalid_parameter, "need d >= 1, B > 0, 0 < gamma < B");
  const double beta = gamma / radius;
  return std::make_unique<HalfspaceCoverLearner>(build_sphere_cover(d, dual(p), beta), beta, horizon, seed);
}

// Baselines ----------------------------------------------------------------------------

class Perceptron final : public OnlineLearner {
 public:
  explicit Perceptron(int d) : w_(static_cast<std::size_t>(d), 0.0) {}

  std::string name() const override { return "perceptron"; }
  const Point& weights() const { return w_; }

 protected:
  int predict(const Point& x) override {
    if (x.size() != w_.size()) throw Error(ErrorKind::shape, "dimension mismatch");
    x_ = x;
    y_hat_ = dot(w_, x) >= 0.0 ? 1 : -1;
    return y_hat_;
  }
  double update(int y) override {
    if (y_hat_ == y) return 0.0;
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] += y * x_[k];
    return 1.0;
  }

 private:
  Point w_;
  Point x_;
  int y_hat_ = 1;
};

/// Majority vote of the version space (ties -> +1); on a mistake every expert
/// that erred is removed.
class Halving final : public OnlineLearner {
 public:
  Halving(CoverSet cover, FiniteExpertClass experts) : cover_(std::move(cover)), experts_(std::move(experts)) {
    reset();
  }

  std::string name() const override { return "halving"; }
  double ln_experts() const override { return std::log(static_cast<double>(experts_.size())); }
  std::size_t alive() const { return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), true)); }
  void reset() { alive_.assign(experts_.size(), true); }

  /// Plays the ground point with index j directly.
  int predict_index(std::size_t j) {
    z_ = j;
    long vote = 0;
    for (std::size_t e = 0; e < alive_.size(); ++e)
      if (alive_[e]) vote += experts_.label(e, z_);
    y_hat_ = vote >= 0 ? 1 : -1;
    return y_hat_;
  }

 protected:
  int predict(const Point& x) override { return predict_index(project_point(cover_, x).index); }

  double update(int y) override {
    if (y_hat_ == y) return 0.0;
    bool any = false;
    for (std::size_t e = 0; e < alive_.size(); ++e) {
      if (alive_[e] && experts_.label(e, z_) != y) alive_[e] = false;
      any = any || alive_[e];
    }
    if (!any) throw Error(ErrorKind::realizability_violation, "version space is empty");
    return 1.0;
  }

 private:
  CoverSet cover_;
  FiniteExpertClass experts_;
  std::vector<bool> alive_;
  std::size_t z_ = 0;
  int y_hat_ = 1;
};

/// Halving on a factored multi-threshold projection. The version space stays a
/// product of per-block sets, and the product majority reduces to the owning
/// block's majority.
class FactoredHalving final : public OnlineLearner {
 public:
  FactoredHalving(CoverSet cover, FactoredExpertClass experts)
      : cover_(std::move(cover)), experts_(std::move(experts)) {
    local_index_.assign(experts_.ground_set.size(), 0);
    for (const auto& b : experts_.blocks)
      for (std::size_t k = 0; k < b.points.size(); ++k) local_index_[b.points[k]] = k;
    reset();
  }

  std::string name() const override { return "halving_factored"; }
  double ln_experts() const override {
    double s = 0.0;
    for (const auto& b : experts_.blocks) s += std::log(static_cast<double>(b.thetas.size()));
    return s;
  }
  void reset() {
    alive_.clear();
    for (const auto& b : experts_.blocks) alive_.emplace_back(b.thetas.size(), true);
  }
  double alive() const {
    double n = 1.0;
    for (const auto& a : alive_) n *= static_cast<double>(std::count(a.begin(), a.end(), true));
    return n;
  }

 protected:
  int predict(const Point& x) override {
    z_ = project_point(cover_, x).index;
    block_ = experts_.owner[z_];
    if (block_ < 0) return y_hat_ = -1;
    const auto& b = experts_.blocks[static_cast<std::size_t>(block_)];
    long vote = 0;
    for (std::size_t e = 0; e < b.thetas.size(); ++e)
      if (alive_[static_cast<std::size_t>(block_)][e]) vote += b.labels[e][local_index_[z_]];
    return y_hat_ = vote >= 0 ? 1 : -1;
  }

  double update(int y) override {
    if (y_hat_ == y) return 0.0;
    if (block_ < 0) throw Error(ErrorKind::realizability_violation, "version space is empty");
    const auto& b = experts_.blocks[static_cast<std::size_t>(block_)];
    auto& a = alive_[static_cast<std::size_t>(block_)];
    bool any = false;
    for (std::size_t e = 0; e < a.size(); ++e) {
      if (a[e] && b.labels[e][local_index_[z_]] != y) a[e] = false;
      any = any || a[e];
    }
    if (!any) throw Error(ErrorKind::realizability_violation, "version space is empty");
    return 1.0;
  }

 private:
  CoverSet cover_;
  FactoredExpertClass experts_;
  std::vector<std::vector<bool>> alive_;
  std::vector<std::size_t> local_index_;
  std::size_t z_ = 0;
  int block_ = -1;
  int y_hat_ = 1;
};

}  // namespace relaxed
