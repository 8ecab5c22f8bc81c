#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "relaxed/error.hpp"
#include "relaxed/gaussian.hpp"
#include "relaxed/metric_cover.hpp"

namespace relaxed {

inline int sign_label(double v) { return v > 0.0 ? 1 : -1; }

// Hypotheses --------------------------------------------------------------------

/// -1 on x <= theta, +1 on x > theta.
struct Threshold {
  double theta = 0.5;
};

/// One block of the lower-bound class: on [lo, hi] the label is +1 iff x > theta.
struct ThresholdBlock {
  double lo = 0.0;
  double hi = 1.0;
  double theta = 0.5;
};

/// Union of disjoint threshold blocks; -1 outside every block.
struct MultiThreshold {
  std::vector<ThresholdBlock> blocks;
};

/// sign<w,x> with sign(0) = +1.
struct Halfspace {
  Point w;
};

using BaseHypothesis = std::variant<Threshold, MultiThreshold, Halfspace>;

/// x -> E_z h(x + sigma z). Threshold and Halfspace use closed forms; other
/// bases need a NoiseBank.
struct SmoothedReal {
  BaseHypothesis base;
  double sigma = 1.0;
  std::shared_ptr<const NoiseBank> bank;
};

using Hypothesis = std::variant<Threshold, MultiThreshold, Halfspace, SmoothedReal>;

inline int label(const Threshold& h, double x) { return x > h.theta ? 1 : -1; }

inline int label(const MultiThreshold& h, double x) {
  for (const auto& b : h.blocks)
    if (x >= b.lo && x <= b.hi) return x > b.theta ? 1 : -1;
  return -1;
}

inline int label(const Halfspace& h, std::span<const double> x) {
  return dot(h.w, x) >= 0.0 ? 1 : -1;
}

inline int label(const BaseHypothesis& h, std::span<const double> x) {
  return std::visit(
      [&](const auto& g) -> int {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, Halfspace>) {
          return label(g, x);
        } else {
          if (x.size() != 1) throw Error(ErrorKind::shape, "1-D hypothesis given a d>1 point");
          return label(g, x[0]);
        }
      },
      h);
}

inline std::size_t input_dim(const BaseHypothesis& h) {
  if (const auto* hs = std::get_if<Halfspace>(&h)) return hs->w.size();
  return 1;
}

inline double smoothed_value(const BaseHypothesis& h, std::span<const double> x, double sigma,
                             const NoiseBank* bank = nullptr) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
  if (x.size() != input_dim(h)) throw Error(ErrorKind::shape, "dimension mismatch");
  if (const auto* t = std::get_if<Threshold>(&h)) return threshold_smoothed(t->theta, x[0], sigma);
  if (const auto* hs = std::get_if<Halfspace>(&h)) return halfspace_smoothed(hs->w, x, sigma);
  if (bank == nullptr) throw Error(ErrorKind::unsupported, "no closed form; a NoiseBank is required");
  if (bank->dim() != x.size()) throw Error(ErrorKind::shape, "noise bank dimension mismatch");
  // Only the bank's standard-normal draws are used; the requested sigma scales them.
  double acc = 0.0;
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < bank->size(); ++i) {
    const auto z = bank->row(i);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = x[k] + sigma * z[k];
    acc += label(h, p);
  }
  return acc / static_cast<double>(bank->size());
}

inline double smoothed_value(const SmoothedReal& h, std::span<const double> x) {
  return smoothed_value(h.base, x, h.sigma, h.bank.get());
}

/// Real value for SmoothedReal, +-1 otherwise.
inline double evaluate(const Hypothesis& h, std::span<const double> x) {
  return std::visit(
      [&](const auto& g) -> double {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, SmoothedReal>) {
          return smoothed_value(g, x);
        } else {
          return label(BaseHypothesis(g), x);
        }
      },
      h);
}

inline int evaluate_label(const Hypothesis& h, std::span<const double> x) {
  return sign_label(evaluate(h, x));
}

// Classes -----------------------------------------------------------------------

struct HypothesisClass {
  enum class Kind { thresholds01, multi_thresholds, halfspaces };

  Kind kind = Kind::thresholds01;
  int dim = 1;
  Norm metric = Norm::l2;
  /// multi_thresholds: sorted candidate thresholds of each block.
  std::vector<std::vector<double>> blocks;
  /// Set for the sigma-smoothed version of the base class.
  std::optional<double> sigma;

  static HypothesisClass thresholds() { return {}; }

  static HypothesisClass halfspaces(int d, Norm p = Norm::l2) {
    if (d < 1) throw Error(ErrorKind::invalid_parameter, "halfspace dimension must be >= 1");
    HypothesisClass c;
    c.kind = Kind::halfspaces;
    c.dim = d;
    c.metric = p;
    return c;
  }

  HypothesisClass smoothed(double s) const {
    if (!(s > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
    HypothesisClass c = *this;
    c.sigma = s;
    return c;
  }

  std::size_t num_blocks() const { return blocks.size(); }

  /// Exact number of members (multi_thresholds only).
  double cardinality() const {
    double n = 1.0;
    for (const auto& b : blocks) n *= static_cast<double>(b.size());
    return n;
  }
};

/// Splits the sorted packing into d consecutive blocks of floor(N/d) points;
/// the N mod d leftovers join the last block.
inline HypothesisClass build_multi_threshold_class(const PackingSet& packing, int d) {
  const std::size_t n = packing.size();
  if (d < 1 || static_cast<std::size_t>(d) > n)
    throw Error(ErrorKind::invalid_parameter, "need 1 <= d <= |packing|");
  std::vector<double> xs;
  xs.reserve(n);
  for (const auto& p : packing.points) {
    if (p.size() != 1) throw Error(ErrorKind::shape, "multi-threshold packing must be 1-D");
    xs.push_back(p[0]);
  }
  std::sort(xs.begin(), xs.end());
  HypothesisClass c;
  c.kind = HypothesisClass::Kind::multi_thresholds;
  const std::size_t per = n / static_cast<std::size_t>(d);
  for (int i = 0; i < d; ++i) {
    const auto first = xs.begin() + static_cast<std::ptrdiff_t>(per * i);
    const auto last = (i == d - 1) ? xs.end() : first + static_cast<std::ptrdiff_t>(per);
    c.blocks.emplace_back(first, last);
  }
  return c;
}

inline MultiThreshold make_multi_threshold(const HypothesisClass& c, std::span<const std::size_t> choice) {
  if (choice.size() != c.blocks.size()) throw Error(ErrorKind::shape, "one index per block expected");
  MultiThreshold h;
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const auto& b = c.blocks[i];
    h.blocks.push_back({b.front(), b.back(), b.at(choice[i])});
  }
  return h;
}

inline int vc_dimension(const HypothesisClass& c) {
  switch (c.kind) {
    case HypothesisClass::Kind::thresholds01: return 1;
    case HypothesisClass::Kind::multi_thresholds: return static_cast<int>(c.blocks.size());
    case HypothesisClass::Kind::halfspaces: return c.dim;
  }
  return 1;
}

/// (e m / vc)^vc, the Sauer-Shelah-Perles form used for m >= vc.
inline double sauer_bound(std::size_t m, int vc) {
  const double v = static_cast<double>(vc);
  return std::pow(std::numbers::e * static_cast<double>(m) / v, v);
}

// Finite projections ------------------------------------------------------------

/// Distinct +-1 behaviours of a class on a ground set, stored as packed bit rows
/// (bit set = +1), each with a witness hypothesis reproducing it.
class FiniteExpertClass {
 public:
  FiniteExpertClass() = default;
  explicit FiniteExpertClass(std::vector<Point> ground, std::string provenance = {})
      : ground_(std::move(ground)),
        provenance_(std::move(provenance)),
        words_((ground_.size() + 63) / 64) {}

  const std::vector<Point>& ground_set() const { return ground_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t size() const { return witnesses_.size(); }
  std::size_t ground_size() const { return ground_.size(); }
  std::size_t words_per_row() const { return words_; }

  int label(std::size_t expert, std::size_t point) const {
    return (bits_[expert * words_ + point / 64] >> (point % 64)) & 1ULL ? 1 : -1;
  }

  std::span<const std::uint64_t> row(std::size_t expert) const {
    return {bits_.data() + expert * words_, words_};
  }

  const Hypothesis& witness(std::size_t expert) const { return witnesses_[expert]; }

  std::vector<int> behavior(std::size_t expert) const {
    std::vector<int> b(ground_.size());
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = label(expert, j);
    return b;
  }

  /// Adds the behaviour if new. Returns true when inserted.
  bool insert(std::span<const std::uint64_t> packed, Hypothesis witness) {
    const std::uint64_t key = hash(packed);
    auto& bucket = index_[key];
    for (std::size_t e : bucket)
      if (std::equal(packed.begin(), packed.end(), row(e).begin())) return false;
    bucket.push_back(witnesses_.size());
    bits_.insert(bits_.end(), packed.begin(), packed.end());
    witnesses_.push_back(std::move(witness));
    return true;
  }

  /// Evaluates `h` on the ground set and inserts the pattern.
  bool insert_hypothesis(const Hypothesis& h) {
    std::vector<std::uint64_t> packed(words_, 0);
    for (std::size_t j = 0; j < ground_.size(); ++j)
      if (evaluate_label(h, ground_[j]) > 0) packed[j / 64] |= 1ULL << (j % 64);
    return insert(packed, h);
  }

 private:
  static std::uint64_t hash(std::span<const std::uint64_t> packed) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto w : packed) h = splitmix64(h ^ w);
    return h;
  }

  std::vector<Point> ground_;
  std::string provenance_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<Hypothesis> witnesses_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index_;
};

/// Per-block factorisation of a multi-threshold projection. Every ground point
/// inside block i's interval depends only on theta_i; points outside all
/// blocks are labelled -1 by every member.
struct FactoredExpertClass {
  struct Block {
    std::vector<std::size_t> points;      // ground indices owned by the block
    std::vector<double> thetas;           // witness theta per local expert
    std::vector<std::vector<int>> labels; // labels[e][k] on points[k]
  };

  std::vector<Point> ground_set;
  std::vector<int> owner;  // block index per ground point, -1 when unowned
  std::vector<Block> blocks;

  double flat_size() const {
    double n = 1.0;
    for (const auto& b : blocks) n *= static_cast<double>(b.thetas.size());
    return n;
  }
};

inline FactoredExpertClass project_factored(const HypothesisClass& c, const std::vector<Point>& ground) {
  if (c.kind != HypothesisClass::Kind::multi_thresholds)
    throw Error(ErrorKind::unsupported, "factored projection is for multi-threshold classes");
  FactoredExpertClass f;
  f.ground_set = ground;
  f.owner.assign(ground.size(), -1);
  f.blocks.resize(c.blocks.size());
  for (std::size_t j = 0; j < ground.size(); ++j) {
    if (ground[j].size() != 1) throw Error(ErrorKind::shape, "multi-threshold ground set must be 1-D");
    for (std::size_t i = 0; i < c.blocks.size(); ++i) {
      if (ground[j][0] >= c.blocks[i].front() && ground[j][0] <= c.blocks[i].back()) {
        f.owner[j] = static_cast<int>(i);
        f.blocks[i].points.push_back(j);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    auto& blk = f.blocks[i];
    std::vector<std::vector<int>> seen;
    for (double theta : c.blocks[i]) {
      std::vector<int> pat;
      pat.reserve(blk.points.size());
      for (std::size_t j : blk.points) pat.push_back(ground[j][0] > theta ? 1 : -1);
      if (std::find(seen.begin(), seen.end(), pat) != seen.end()) continue;
      seen.push_back(pat);
      blk.thetas.push_back(theta);
      blk.labels.push_back(std::move(pat));
    }
  }
  return f;
}

namespace detail {

inline constexpr double kMaxFlatExperts = 4'194'304.0;

inline void project_thresholds(FiniteExpertClass& out, const std::vector<Point>& ground,
                               std::optional<double> sigma) {
  std::vector<std::size_t> order(ground.size());
  for (std::size_t j = 0; j < ground.size(); ++j) {
    if (ground[j].size() != 1) throw Error(ErrorKind::shape, "threshold ground set must be 1-D");
    order[j] = j;
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ground[a][0] < ground[b][0]; });
  auto witness = [&](double t) -> Hypothesis {
    if (sigma) return SmoothedReal{Threshold{t}, *sigma, nullptr};
    return Threshold{t};
  };
  // Sweep theta upwards: below every point all labels are +1, and raising theta
  // to the next distinct value x flips exactly the points equal to x. Smoothing
  // keeps these labels since sign(1 - 2 Phi((theta - x)/sigma)) = h_theta(x).
  std::vector<std::uint64_t> row(out.words_per_row(), 0);
  for (std::size_t j = 0; j < ground.size(); ++j) row[j / 64] |= 1ULL << (j % 64);
  out.insert(row, witness(ground[order.front()][0] - 1.0));
  for (std::size_t k = 0; k < order.size();) {
    const double v = ground[order[k]][0];
    for (; k < order.size() && ground[order[k]][0] == v; ++k)
      row[order[k] / 64] &= ~(1ULL << (order[k] % 64));
    out.insert(row, witness(v));
  }
}

inline void insert_halfspace(FiniteExpertClass& out, Point w, std::optional<double> sigma) {
  if (sigma) {
    out.insert_hypothesis(SmoothedReal{Halfspace{std::move(w)}, *sigma, nullptr});
  } else {
    out.insert_hypothesis(Halfspace{std::move(w)});
  }
}

inline void project_halfspaces_2d(FiniteExpertClass& out, const std::vector<Point>& ground,
                                  std::optional<double> sigma) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> crit;
  for (const auto& x : ground) {
    if (x[0] == 0.0 && x[1] == 0.0) continue;
    const double a = std::atan2(x[1], x[0]);
    for (double c : {a + std::numbers::pi / 2.0, a - std::numbers::pi / 2.0})
      crit.push_back(std::fmod(std::fmod(c, two_pi) + two_pi, two_pi));
  }
  std::sort(crit.begin(), crit.end());
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
  std::vector<double> angles;
  if (crit.empty()) {
    angles.push_back(0.0);
  } else {
    for (std::size_t i = 0; i < crit.size(); ++i) {
      const double next = i + 1 < crit.size() ? crit[i + 1] : crit.front() + two_pi;
      angles.push_back(crit[i]);
      angles.push_back(0.5 * (crit[i] + next));
    }
  }
  for (double a : angles) insert_halfspace(out, {std::cos(a), std::sin(a)}, sigma);
}

inline Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Sphere arrangement in R^3: every open cell touches a vertex x_i x x_j, so
/// stepping off each vertex into its four adjacent quadrants reaches every
/// cell. Assumes general position of the ground set.
inline void project_halfspaces_3d(FiniteExpertClass& out, const std::vector<Point>& ground,
                                  std::optional<double> sigma) {
  std::vector<Point> xs;
  for (const auto& x : ground)
    if (norm(Norm::l2, x) > 0.0) xs.push_back(x);
  const double step = 1e-7;
  auto normalized = [](Point v) {
    const double n = norm(Norm::l2, v);
    for (auto& a : v) a /= n;
    return v;
  };
  if (xs.empty()) {
    insert_halfspace(out, {1.0, 0.0, 0.0}, sigma);
    return;
  }
  // Both sides of every single plane (covers the case of one plane or all parallel).
  for (const auto& x : xs) {
    for (double s : {1.0, -1.0}) {
      Point w = normalized(x);
      for (auto& a : w) a *= s;
      insert_halfspace(out, w, sigma);
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      Point v = cross(xs[i], xs[j]);
      if (norm(Norm::l2, v) < 1e-12) continue;
      v = normalized(v);
      const double gii = dot(xs[i], xs[i]), gij = dot(xs[i], xs[j]), gjj = dot(xs[j], xs[j]);
      const double det = gii * gjj - gij * gij;
      for (double vs : {1.0, -1.0}) {
        for (double a : {1.0, -1.0}) {
          for (double b : {1.0, -1.0}) {
            // Direction d with <d,x_i> = a and <d,x_j> = b.
            const double c1 = (a * gjj - b * gij) / det;
            const double c2 = (b * gii - a * gij) / det;
            Point w(3);
            for (int k = 0; k < 3; ++k) w[k] = vs * v[k] + step * (c1 * xs[i][k] + c2 * xs[j][k]);
            insert_halfspace(out, normalized(w), sigma);
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Exact distinct behaviours of `c` on `ground`.
inline FiniteExpertClass project_class(const HypothesisClass& c, const std::vector<Point>& ground) {
  if (ground.empty()) throw Error(ErrorKind::invalid_parameter, "ground set must be nonempty");
  switch (c.kind) {
    case HypothesisClass::Kind::thresholds01: {
      FiniteExpertClass out(ground, c.sigma ? "smoothed_thresholds" : "thresholds01");
      detail::project_thresholds(out, ground, c.sigma);
      return out;
    }
    case HypothesisClass::Kind::multi_thresholds: {
      const auto f = project_factored(c, ground);
      if (f.flat_size() > detail::kMaxFlatExperts)
        throw Error(ErrorKind::resource, "flat multi-threshold projection too large; use the factored form");
      FiniteExpertClass out(ground, "multi_thresholds");
      std::vector<std::size_t> local(f.blocks.size(), 0);
      while (true) {
        MultiThreshold h;
        for (std::size_t i = 0; i < f.blocks.size(); ++i)
          h.blocks.push_back({c.blocks[i].front(), c.blocks[i].back(), f.blocks[i].thetas[local[i]]});
        out.insert_hypothesis(h);
        std::size_t k = 0;
        while (k < local.size() && ++local[k] == f.blocks[k].thetas.size()) local[k++] = 0;
        if (k == local.size()) break;
      }
      return out;
    }
    case HypothesisClass::Kind::halfspaces: {
      for (const auto& x : ground)
        if (static_cast<int>(x.size()) != c.dim) throw Error(ErrorKind::shape, "ground point dimension mismatch");
      FiniteExpertClass out(ground, c.sigma ? "smoothed_halfspaces" : "halfspaces");
      if (c.dim == 1) {
        detail::insert_halfspace(out, {1.0}, c.sigma);
        detail::insert_halfspace(out, {-1.0}, c.sigma);
      } else if (c.dim == 2) {
        detail::project_halfspaces_2d(out, ground, c.sigma);
      } else if (c.dim == 3) {
        detail::project_halfspaces_3d(out, ground, c.sigma);
      } else {
        throw Error(ErrorKind::unsupported,
                    "halfspace enumeration supports d <= 3; use the halfspace cover learner");
      }
      return out;
    }
  }
  throw Error(ErrorKind::unsupported, "unknown class kind");
}

/// True when every labelling of `points` is realised by the class.
inline bool is_shattered(const HypothesisClass& c, const std::vector<Point>& points) {
  if (points.size() >= 63) return false;
  const auto proj = project_class(c, points);
  return proj.size() == (std::size_t{1} << points.size());
}

// JSON ----------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const FiniteExpertClass& f) {
  auto behaviors = nlohmann::json::array();
  for (std::size_t e = 0; e < f.size(); ++e) behaviors.push_back(f.behavior(e));
  j = {{"provenance", f.provenance()}, {"ground_set", f.ground_set()}, {"behaviors", behaviors}};
}

}  // namespace relaxed
