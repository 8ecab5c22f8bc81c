#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "json.hpp"
#include "relaxed/error.hpp"
#include "relaxed/rng.hpp"

namespace relaxed {

/// Multiplicative Weights state. Weights live in the log domain and are
/// normalised only when read.
struct WeightState {
  std::vector<double> log_weights;
  double eta = 1.0;
  std::size_t round = 0;

  std::size_t size() const { return log_weights.size(); }

  double log_normalizer() const {
    const double m = *std::max_element(log_weights.begin(), log_weights.end());
    double s = 0.0;
    for (double lw : log_weights) s += std::exp(lw - m);
    return m + std::log(s);
  }

  std::vector<double> probabilities() const {
    const double m = *std::max_element(log_weights.begin(), log_weights.end());
    std::vector<double> p(log_weights.size());
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] = std::exp(log_weights[i] - m));
    for (auto& v : p) v /= s;
    return p;
  }

  /// sum_i P(i) loss_i.
  double expected(std::span<const double> losses) const {
    const auto p = probabilities();
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * losses[i];
    return e;
  }
};

inline WeightState mw_init(std::size_t num_experts, double eta) {
  if (num_experts == 0) throw Error(ErrorKind::empty_expert_set, "MW needs at least one expert");
  if (!(eta > 0.0)) throw Error(ErrorKind::invalid_parameter, "eta must be > 0");
  return WeightState{std::vector<double>(num_experts, 0.0), eta, 0};
}

/// Inverse-CDF draw from a normalised distribution.
inline std::size_t sample_index(std::span<const double> p, CounterRng& rng) {
  const double u = rng.uniform();
  double c = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    c += p[i];
    if (u < c) return i;
  }
  // Rounding left the total just under 1: return the last positive entry.
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return i;
  return 0;
}

inline std::size_t mw_sample(const WeightState& s, CounterRng& rng) {
  const auto p = s.probabilities();
  return sample_index(p, rng);
}

inline void mw_update_in_place(WeightState& s, std::span<const double> losses) {
  if (losses.size() != s.size()) throw Error(ErrorKind::shape, "one loss per expert expected");
  for (double l : losses)
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::invalid_loss, "losses must lie in [0,1]");
  for (std::size_t i = 0; i < losses.size(); ++i) s.log_weights[i] -= s.eta * losses[i];
  ++s.round;
}

inline WeightState mw_update(WeightState s, std::span<const double> losses) {
  mw_update_in_place(s, losses);
  return s;
}

/// sqrt(8 ln N / T), or 1e-6 when there is a single expert.
inline double default_eta(double ln_n, std::size_t horizon) {
  if (ln_n < 0.0 || horizon < 1) throw Error(ErrorKind::invalid_parameter, "need ln N >= 0 and T >= 1");
  if (ln_n == 0.0) return 1e-6;
  return std::sqrt(8.0 * ln_n / static_cast<double>(horizon));
}

/// ln(1 + sqrt(2 ln N / OPT)); OPT = 0 maps to eta = 20 (the eta -> infinity limit).
inline double tuned_eta(double ln_n, double opt) {
  if (ln_n < 0.0 || opt < 0.0) throw Error(ErrorKind::invalid_parameter, "need ln N, OPT >= 0");
  if (ln_n == 0.0) return 1e-6;
  if (opt == 0.0) return 20.0;
  return std::log1p(std::sqrt(2.0 * ln_n / opt));
}

/// (eta OPT + ln N) / (1 - e^{-eta}).
inline double mw_loss_bound(double eta, double opt, double ln_n) {
  return (eta * opt + ln_n) / (-std::expm1(-eta));
}

struct RegretCertificate {
  double ln_n = 0.0;
  std::size_t horizon = 0;
  double opt_loss = 0.0;
  double bound = 0.0;
};

inline RegretCertificate regret_certificate(double ln_n, double opt_loss, std::size_t horizon = 0) {
  if (ln_n < 0.0 || opt_loss < 0.0) throw Error(ErrorKind::invalid_parameter, "need ln N, OPT >= 0");
  return {ln_n, horizon, opt_loss, std::sqrt(2.0 * opt_loss * ln_n) + ln_n};
}

inline void to_json(nlohmann::json& j, const WeightState& s) {
  j = {{"eta", s.eta}, {"round", s.round}, {"log_weights", s.log_weights}};
}

inline void from_json(const nlohmann::json& j, WeightState& s) {
  s.eta = j.at("eta").get<double>();
  s.round = j.at("round").get<std::size_t>();
  s.log_weights = j.at("log_weights").get<std::vector<double>>();
}

inline void to_json(nlohmann::json& j, const RegretCertificate& c) {
  j = {{"ln_n", c.ln_n}, {"T", c.horizon}, {"opt_loss", c.opt_loss}, {"bound", c.bound}};
}

}  // namespace relaxed
