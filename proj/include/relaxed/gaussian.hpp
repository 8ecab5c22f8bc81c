#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "json.hpp"
#include "relaxed/error.hpp"
#include "relaxed/rng.hpp"

namespace relaxed {

/// Standard normal CDF.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Inverse CDF by bisection on phi. Runs until the bracket stops shrinking,
/// which leaves |phi(result) - q| far below 1e-10.
inline double phi_inv(double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::domain, "phi_inv needs q in (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) < q ? lo : hi) = mid;
  }
  return std::abs(phi(lo) - q) <= std::abs(phi(hi) - q) ? lo : hi;
}

/// sqrt(2/pi)/sigma, the Lipschitz constant of any sigma-smoothed [-1,1] map.
inline double lipschitz_constant(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
  return std::sqrt(2.0 / std::numbers::pi) / sigma;
}

/// E h_theta(x + sigma z) for h_theta = -1 on x <= theta, +1 above.
inline double threshold_smoothed(double theta, double x, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
  return 1.0 - 2.0 * phi((theta - x) / sigma);
}

/// E sign<w, x + sigma z>.
inline double halfspace_smoothed(std::span<const double> w, std::span<const double> x,
                                 double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
  if (w.size() != x.size()) throw Error(ErrorKind::shape, "dimension mismatch");
  double wx = 0.0, ww = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wx += w[i] * x[i];
    ww += w[i] * w[i];
  }
  if (ww == 0.0) throw Error(ErrorKind::invalid_parameter, "halfspace normal must be nonzero");
  return 2.0 * phi(wx / (sigma * std::sqrt(ww))) - 1.0;
}

/// M x d standard normal draws regenerated from (seed, M, d).
class NoiseBank {
 public:
  NoiseBank(double sigma, std::size_t m, std::size_t d, std::uint64_t seed)
      : sigma_(sigma), m_(m), d_(d), seed_(seed) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::domain, "sigma must be > 0");
    if (m < 1 || d < 1) throw Error(ErrorKind::invalid_parameter, "noise bank needs M, d >= 1");
    CounterRng rng(seed, 0x6e6f697365ULL);
    samples_.resize(m * d);
    for (auto& z : samples_) z = rng.normal();
  }

  double sigma() const { return sigma_; }
  std::size_t size() const { return m_; }
  std::size_t dim() const { return d_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> row(std::size_t i) const { return {samples_.data() + i * d_, d_}; }

  /// Per-coordinate sample means lie within 5/sqrt(M) of zero.
  bool sanity_ok() const {
    const double tol = 5.0 / std::sqrt(static_cast<double>(m_));
    for (std::size_t k = 0; k < d_; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += samples_[i * d_ + k];
      if (std::abs(s / static_cast<double>(m_)) > tol) return false;
    }
    return true;
  }

  /// (1/M) sum_i f(x + sigma z_i).
  template <class F>
  double mean_at(std::span<const double> x, F&& f) const {
    if (x.size() != d_) throw Error(ErrorKind::shape, "noise bank dimension mismatch");
    std::vector<double> p(d_);
    double acc = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto z = row(i);
      for (std::size_t k = 0; k < d_; ++k) p[k] = x[k] + sigma_ * z[k];
      acc += f(std::span<const double>(p));
    }
    return acc / static_cast<double>(m_);
  }

  /// sup_theta |(1/M) #{z_i <= t} - Phi(t)| over the first coordinate, i.e. the
  /// worst threshold error-probability deviation at any centre point.
  double ks_statistic() const {
    std::vector<double> z(m_);
    for (std::size_t i = 0; i < m_; ++i) z[i] = samples_[i * d_];
    std::sort(z.begin(), z.end());
    const double m = static_cast<double>(m_);
    double sup = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double f = phi(z[i]);
      sup = std::max({sup, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return sup;
  }

 private:
  double sigma_;
  std::size_t m_, d_;
  std::uint64_t seed_;
  std::vector<double> samples_;
};

inline void to_json(nlohmann::json& j, const NoiseBank& b) {
  j = {{"sigma", b.sigma()}, {"M", b.size()}, {"d", b.dim()}, {"seed", b.seed()}};
}

inline NoiseBank noise_bank_from_json(const nlohmann::json& j) {
  return NoiseBank(j.at("sigma").get<double>(), j.at("M").get<std::size_t>(),
                   j.at("d").get<std::size_t>(), j.at("seed").get<std::uint64_t>());
}

struct LipschitzReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double constant = 0.0;
  double slack = 0.0;
  double max_ratio = 0.0;  // max |v(x)-v(x')| / ||x-x'||_2 seen
  bool pass() const { return violations == 0; }
};

/// Samples pairs from `sample(rng)` and counts |v(x)-v(x')| > L||x-x'||_2 + slack.
/// A 1e-15 absolute guard absorbs rounding in the closed forms.
template <class Value, class Sampler>
LipschitzReport check_lipschitz(Value&& value, Sampler&& sample, double sigma,
                                std::size_t trials, std::uint64_t seed, double slack = 0.0) {
  LipschitzReport r;
  r.trials = trials;
  r.constant = lipschitz_constant(sigma);
  r.slack = slack;
  CounterRng rng(seed, 0x6c697073ULL);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto a = sample(rng);
    const auto b = sample(rng);
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    const double dist = std::sqrt(d2);
    const double diff = std::abs(value(a) - value(b));
    if (dist > 0.0) r.max_ratio = std::max(r.max_ratio, diff / dist);
    if (diff > r.constant * dist + slack + 1e-15) ++r.violations;
  }
  return r;
}

struct TransferCheck {
  bool left = false;   // 1[Pr(h(x~+sigma z) != y) >= a + L ||x - x~||]
  bool right = false;  // 1[Pr(h(x+sigma z) != y) >= a]
  bool holds() const { return !left || right; }
};

/// Error probability of a smoothed +-1 predictor with mean value v against y.
inline double smoothed_error_probability(double value, int y) { return 0.5 * (1.0 - y * value); }

template <class Value>
TransferCheck transfer_loss_bound_check(Value&& value, std::span<const double> x,
                                        std::span<const double> x_tilde, int y, double sigma,
                                        double a) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - x_tilde[k]) * (x[k] - x_tilde[k]);
  const double shift = lipschitz_constant(sigma) * std::sqrt(d2);
  TransferCheck c;
  c.left = smoothed_error_probability(value(x_tilde), y) >= a + shift;
  c.right = smoothed_error_probability(value(x), y) >= a;
  return c;
}

}  // namespace relaxed
