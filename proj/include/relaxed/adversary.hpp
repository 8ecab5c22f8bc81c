#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "relaxed/benchmarks.hpp"
#include "relaxed/error.hpp"
#include "relaxed/hypothesis.hpp"
#include "relaxed/rng.hpp"
#include "relaxed/sequence.hpp"

namespace relaxed {

enum class StreamKind { realizable_pert, realizable_gauss, realizable_margin, mistake_tree };

inline const char* to_string(StreamKind k) {
  switch (k) {
    case StreamKind::realizable_pert: return "realizable_pert";
    case StreamKind::realizable_gauss: return "realizable_gauss";
    case StreamKind::realizable_margin: return "realizable_margin";
    case StreamKind::mistake_tree: return "mistake_tree";
  }
  return "realizable_pert";
}

inline StreamKind parse_stream_kind(const std::string& s) {
  if (s == "realizable_pert") return StreamKind::realizable_pert;
  if (s == "realizable_gauss") return StreamKind::realizable_gauss;
  if (s == "realizable_margin") return StreamKind::realizable_margin;
  if (s == "mistake_tree") return StreamKind::mistake_tree;
  throw Error(ErrorKind::usage, "unknown stream kind '" + s + "'");
}

/// A generated stream with the hidden comparator that makes it realizable.
struct GeneratedStream {
  Sequence seq;
  std::optional<BaseHypothesis> witness;
  std::size_t flips = 0;
};

namespace detail {

inline constexpr std::size_t kRejectionWindow = 100'000;

/// Hidden witness drawn from the seed: theta* ~ U[0.25, 0.75], or a random
/// normal from the benchmark angle grid (so grid evaluators can attain it).
inline BaseHypothesis sample_witness(const HypothesisClass& c, CounterRng& rng) {
  if (c.kind == HypothesisClass::Kind::thresholds01) return Threshold{rng.uniform(0.25, 0.75)};
  if (c.kind == HypothesisClass::Kind::halfspaces) {
    if (c.dim == 1) return Halfspace{{rng.rademacher() * 1.0}};
    if (c.dim == 2) {
      const double a = angle(rng.below(kAngleGrid));
      return Halfspace{{std::cos(a), std::sin(a)}};
    }
    return Halfspace{sample_unit_sphere(c.dim, Norm::l2, rng)};
  }
  throw Error(ErrorKind::unsupported, "no witness sampler for multi-threshold classes; use the mistake tree");
}

/// y * (value used by the realizability test) for the hidden witness.
inline double witness_score(StreamKind kind, const HypothesisClass& c, const BaseHypothesis& h,
                            const Point& x, int y) {
  if (const auto* t = std::get_if<Threshold>(&h)) {
    switch (kind) {
      case StreamKind::realizable_pert: return y * (x[0] - t->theta);
      case StreamKind::realizable_gauss: return y * threshold_smoothed(t->theta, x[0], *c.sigma);
      case StreamKind::realizable_margin: return y * threshold_smoothed(t->theta, x[0], *c.sigma);
      default: break;
    }
  }
  if (const auto* hs = std::get_if<Halfspace>(&h)) {
    switch (kind) {
      case StreamKind::realizable_pert:
      case StreamKind::realizable_margin: return normalized_margin(hs->w, {x, y}, c.metric);
      case StreamKind::realizable_gauss: return y * halfspace_smoothed(hs->w, x, *c.sigma);
      default: break;
    }
  }
  throw Error(ErrorKind::unsupported, "unsupported witness for this stream kind");
}

}  // namespace detail

struct RealizableSpec {
  StreamKind kind = StreamKind::realizable_pert;
  HypothesisClass cls;
  Domain domain;
  double gamma = 0.0;    // pert / margin
  double sigma = 0.0;    // gauss
  double epsilon = 0.0;  // gauss
};

/// Rejection sampler: x ~ U(domain), y = witness label, keep x iff the
/// witness clears the relaxed loss (score > gamma, or > eps for gauss).
inline GeneratedStream gen_realizable(const RealizableSpec& spec, std::size_t horizon, std::uint64_t seed,
                                      std::optional<BaseHypothesis> witness = std::nullopt) {
  CounterRng rng(seed, 0x73747265616dULL);
  HypothesisClass c = spec.cls;
  double cut = spec.gamma;
  if (spec.kind == StreamKind::realizable_gauss) {
    if (!(spec.sigma > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
    c.sigma = spec.sigma;
    cut = spec.epsilon;
  } else if (spec.kind == StreamKind::realizable_margin && c.kind == HypothesisClass::Kind::thresholds01) {
    if (!c.sigma) throw Error(ErrorKind::invalid_parameter, "margin thresholds need a smoothed class");
  } else if (spec.kind == StreamKind::mistake_tree) {
    throw Error(ErrorKind::invalid_parameter, "use the mistake tree generator");
  }
  GeneratedStream out;
  out.seq.domain = spec.domain;
  out.witness = witness ? *witness : detail::sample_witness(c, rng);
  std::size_t draws = 0;
  while (out.seq.size() < horizon) {
    Point x = sample_uniform(spec.domain, rng);
    ++draws;
    const int y = label(*out.witness, x);
    if (detail::witness_score(spec.kind, c, *out.witness, x, y) > cut) out.seq.items.push_back({std::move(x), y});
    if (draws >= detail::kRejectionWindow && out.seq.size() * 100 < draws)
      throw Error(ErrorKind::infeasible_margin, "more than 99% of draws rejected; relax the margin");
  }
  return out;
}

/// Flips each label independently with probability p.
inline GeneratedStream gen_agnostic(GeneratedStream base, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 0.5)) throw Error(ErrorKind::invalid_parameter, "flip rate must lie in [0, 1/2)");
  CounterRng rng(seed, 0x666c6970ULL);
  for (auto& it : base.seq.items) {
    if (rng.bernoulli(p)) {
      it.y = -it.y;
      ++base.flips;
    }
  }
  return base;
}

/// Random-label mistake tree over N evenly spaced thresholds split into d
/// blocks; each block is searched by bisection over its live thresholds.
class MistakeTree {
 public:
  MistakeTree(int d, int n, double alpha, std::uint64_t seed)
      : d_(d), n_(n), alpha_(alpha), rng_(seed, 0x74726565ULL) {
    if (d < 1 || n < 2 * d) throw Error(ErrorKind::invalid_parameter, "need d >= 1 and N >= 2d");
    if (!(alpha > 0.0) || !(n * 2.0 * alpha < 1.0))
      throw Error(ErrorKind::infeasible_margin, "thresholds spaced by more than 2 alpha do not fit: need N*2*alpha < 1");
    PackingSet packing{Domain::interval01(), 2.0 * alpha, {}};
    for (int j = 0; j < n; ++j) packing.points.push_back({(j + 0.5) / n});
    cls_ = build_multi_threshold_class(packing, d);
    steps_per_block_ = static_cast<int>(std::floor(std::log2(static_cast<double>(n / d))));
    restart();
  }

  int depth() const { return d_ * steps_per_block_; }
  const HypothesisClass& hypothesis_class() const { return cls_; }
  double alpha() const { return alpha_; }
  std::size_t replays_completed() const { return replays_; }
  std::size_t audit_failures() const { return audit_failures_; }

  /// Instance at the current node: midway between the two live thresholds that
  /// bisect the current block.
  double query() const {
    const auto& a = cls_.blocks[block_];
    const std::size_t mid = (lo_ + hi_) / 2;
    return 0.5 * (a[mid] + a[mid + 1]);
  }

  /// Descends with label y; when every block is resolved, audits the path and
  /// restarts a fresh copy.
  void descend(int y) {
    const std::size_t mid = (lo_ + hi_) / 2;
    path_.push_back({{query()}, y});
    if (y > 0) {
      hi_ = mid;
    } else {
      lo_ = mid + 1;
    }
    choice_[block_] = lo_;
    if (++step_ == steps_per_block_) {
      step_ = 0;
      if (++block_ == static_cast<std::size_t>(d_)) {
        if (!audit_path()) ++audit_failures_;
        ++replays_;
        restart();
        return;
      }
      lo_ = 0;
      hi_ = cls_.blocks[block_].size() - 1;
    }
  }

  /// One round: the learner sees x (its prediction does not influence the
  /// label), the label is a fresh fair coin.
  std::pair<double, int> round(const std::function<void(double)>& on_query = {}) {
    const double x = query();
    if (on_query) on_query(x);
    const int y = rng_.rademacher();
    descend(y);
    return {x, y};
  }

  /// The comparator read off the path is alpha-robustly consistent with every
  /// instance of the current replay.
  bool audit_path() const {
    const auto h = make_multi_threshold(cls_, choice_);
    for (const auto& p : path_)
      if (pert_loss_multi(h, p.x[0], p.y, alpha_) != 0) return false;
    return true;
  }

 private:
  void restart() {
    block_ = 0;
    step_ = 0;
    lo_ = 0;
    hi_ = cls_.blocks[0].size() - 1;
    path_.clear();
    choice_.assign(static_cast<std::size_t>(d_), 0);
  }

  int d_, n_;
  double alpha_;
  CounterRng rng_;
  HypothesisClass cls_;
  int steps_per_block_ = 0;
  std::size_t block_ = 0, lo_ = 0, hi_ = 0;
  int step_ = 0;
  std::vector<std::size_t> choice_;
  std::vector<LabeledPoint> path_;
  std::size_t replays_ = 0, audit_failures_ = 0;
};

inline MistakeTree build_mistake_tree(int d, int n, double alpha, std::uint64_t seed = 0) {
  return MistakeTree(d, n, alpha, seed);
}

inline std::pair<double, int> mistake_tree_round(MistakeTree& tree, const std::function<void(double)>& on_query = {}) {
  return tree.round(on_query);
}

inline GeneratedStream gen_mistake_tree(MistakeTree& tree, std::size_t horizon) {
  GeneratedStream out;
  out.seq.domain = Domain::interval01();
  for (std::size_t t = 0; t < horizon; ++t) {
    auto [x, y] = tree.round();
    out.seq.items.push_back({{x}, y});
  }
  return out;
}

}  // namespace relaxed
