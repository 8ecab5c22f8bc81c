#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaxed/adversary.hpp"
#include "relaxed/benchmarks.hpp"
#include "relaxed/gaussian.hpp"
#include "relaxed/harness.hpp"
#include "relaxed/learners.hpp"
#include "relaxed/metric_cover.hpp"
#include "relaxed/mw_core.hpp"

namespace relaxed {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  json metrics = json::object();
  double seconds = 0.0;
};

struct SuiteContext {
  double bound_scale = 1.0;
  unsigned threads = 1;
};

namespace acceptance {

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

inline std::vector<std::uint64_t> seed_list(const json& p, std::size_t fallback_count) {
  const auto start = p.value("seed_start", std::uint64_t{1});
  const auto count = p.value("seeds", fallback_count);
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < count; ++i) s.push_back(start + i);
  return s;
}

inline double max_excess_ratio(const ExperimentSummary& s) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : s.seeds) worst = std::max(worst, r.excess / r.bound);
  return worst;
}

/// Runs one config per stream variant; pass requires every seed within bound.
inline bool run_upper_bound(const std::vector<ExperimentConfig>& cfgs, const SuiteContext& ctx, json& metrics,
                            std::string& detail, const std::function<bool(const SeedResult&)>& extra = {}) {
  bool ok = true;
  double worst_ratio = -std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  double bound = 0.0;
  for (const auto& cfg : cfgs) {
    const auto s = run_experiment(cfg, ctx.threads);
    json runs = json::array();
    for (const auto& r : s.seeds) {
      runs.push_back({{"seed", r.seed}, {"loss", r.learner_loss}, {"benchmark", r.benchmark ? r.benchmark->value : 0.0},
                      {"excess", r.excess}, {"bound", r.bound}, {"ok", r.bound_satisfied}});
      if (extra && !extra(r)) ok = false;
      if (r.excess > worst_excess) {
        worst_excess = r.excess;
        bound = r.bound;
      }
    }
    metrics[cfg.name] = {{"runs", runs}, {"info", s.seeds.front().extra}};
    ok = ok && s.all_bounds_satisfied();
    worst_ratio = std::max(worst_ratio, max_excess_ratio(s));
  }
  detail = "max excess=" + fmt(worst_excess, 2) + " (bound " + fmt(bound, 2) + "), max excess/bound=" + fmt(worst_ratio, 3);
  return ok;
}

inline ExperimentConfig make_config(std::string name, std::size_t horizon, std::vector<std::uint64_t> seeds, json cls,
                                    json learner, json stream, json bench, json bound) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.horizon = horizon;
  c.seeds = std::move(seeds);
  c.cls = std::move(cls);
  c.learner = std::move(learner);
  c.stream = std::move(stream);
  c.benchmark = std::move(bench);
  c.bound = std::move(bound);
  return c;
}

inline bool within_budget(double seconds, const json& p, std::string& detail) {
  if (!p.contains("max_seconds")) return true;
  const double budget = p.at("max_seconds").get<double>();
  if (seconds <= budget) return true;
  detail += "; runtime " + fmt(seconds, 1) + "s over budget " + fmt(budget, 0) + "s";
  return false;
}

// AC-1 ---------------------------------------------------------------------------------
inline bool ac1(const json& p, const SuiteContext& ctx, json& m, std::string& detail) {
  const double gamma = p.value("gamma", 0.05);
  const auto horizon = p.value("T", std::size_t{4096});
  std::vector<ExperimentConfig> cfgs;
  for (double flip : p.value("flip_rates", std::vector<double>{0.0, 0.1, 0.3})) {
    cfgs.push_back(make_config("ac1_p" + fmt(flip, 2), horizon, seed_list(p, 20), {{"kind", "thresholds01"}},
                               {{"kind", "perturbation"}, {"gamma", gamma}},
                               {{"kind", "realizable_pert"}, {"gamma", gamma}, {"flip_rate", flip}},
                               {{"kind", "pert"}, {"gamma", gamma}}, {{"kind", "cover_mw"}, {"scale", ctx.bound_scale}}));
  }
  const auto cover = build_interval_cover(gamma);
  m["cover_size"] = cover.size();
  return run_upper_bound(cfgs, ctx, m, detail);
}

// AC-2 ---------------------------------------------------------------------------------
inline bool ac2(const json& p, const SuiteContext& ctx, json& m, std::string& detail) {
  const double sigma = p.value("sigma", 0.3), eps = p.value("epsilon", 0.4);
  const auto horizon = p.value("T", std::size_t{4096});
  const json learner = {{"kind", "gaussian"}, {"sigma", sigma}, {"epsilon", eps}};
  const json bench = {{"kind", "gauss"}, {"sigma", sigma}, {"epsilon", eps}};
  const json bound = {{"kind", "experts"}, {"scale", ctx.bound_scale}};
  std::vector<ExperimentConfig> cfgs{
      make_config("ac2_realizable", horizon, seed_list(p, 10), {{"kind", "thresholds01"}}, learner,
                  {{"kind", "realizable_gauss"}, {"sigma", sigma}, {"epsilon", eps}}, bench, bound),
      make_config("ac2_agnostic", horizon, seed_list(p, 10), {{"kind", "thresholds01"}}, learner,
                  {{"kind", "realizable_gauss"}, {"sigma", sigma}, {"epsilon", eps}, {"flip_rate", p.value("flip_rate", 0.2)}},
                  bench, bound)};
  bool audits = true;
  const bool ok = run_upper_bound(cfgs, ctx, m, detail, [&](const SeedResult& r) {
    audits = audits && r.extra.at("audit_pass").get<bool>();
    return r.extra.at("audit_pass").get<bool>();
  });
  detail += audits ? "; eps~ audit ok" : "; eps~ audit FAILED";
  return ok;
}

// AC-3 ---------------------------------------------------------------------------------
inline bool ac3(const json& p, const SuiteContext& ctx, json& m, std::string& detail) {
  const double gamma = p.value("gamma", 0.1), radius = p.value("radius", 1.0);
  const auto horizon = p.value("T", std::size_t{4096});
  const json cls = {{"kind", "halfspaces"}, {"dim", 2}, {"norm", "l2"}};
  const json learner = {{"kind", "halfspace_cover"}, {"gamma", gamma}, {"radius", radius}};
  const json bench = {{"kind", "margin"}, {"gamma", gamma}};
  const json bound = {{"kind", "experts"}, {"scale", ctx.bound_scale}};
  std::vector<ExperimentConfig> cfgs{
      make_config("ac3_realizable", horizon, seed_list(p, 20), cls, learner,
                  {{"kind", "realizable_margin"}, {"gamma", gamma}, {"radius", radius}}, bench, bound),
      make_config("ac3_agnostic", horizon, seed_list(p, 20), cls, learner,
                  {{"kind", "realizable_margin"}, {"gamma", gamma}, {"radius", radius}, {"flip_rate", p.value("flip_rate", 0.2)}},
                  bench, bound)};
  bool ok = run_upper_bound(cfgs, ctx, m, detail);
  const auto cover = build_sphere_cover(2, Norm::l2, gamma / radius);
  const double ln_c = std::log(static_cast<double>(cover.size()));
  const double cap = 2.0 * std::log(1.0 + 2.0 * radius / gamma) + cover.log_constant;
  m["ln_cover"] = ln_c;
  m["ln_cover_cap"] = cap;
  detail += "; ln|C_beta|=" + fmt(ln_c, 3) + " <= " + fmt(cap, 3);
  ok = ok && ln_c <= cap;
  return ok;
}

// AC-4 ---------------------------------------------------------------------------------
inline bool ac4(const json& p, const SuiteContext& ctx, json& m, std::string& detail) {
  const double sigma = p.value("sigma", 0.1), gamma = p.value("gamma", 0.2);
  const auto horizon = p.value("T", std::size_t{4096});
  const json cls = {{"kind", "thresholds01"}, {"sigma", sigma}};
  const json bench = {{"kind", "margin"}, {"gamma", gamma}};
  const json bound = {{"kind", "experts"}, {"scale", ctx.bound_scale}};
  std::vector<ExperimentConfig> cfgs;
  for (const std::string mode : {"G0", "Gquarter"}) {
    const json learner = {{"kind", "margin"}, {"gamma", gamma}, {"cover_mode", mode}};
    cfgs.push_back(make_config("ac4_" + mode + "_realizable", horizon, seed_list(p, 10), cls, learner,
                               {{"kind", "realizable_margin"}, {"gamma", gamma}}, bench, bound));
    cfgs.push_back(make_config("ac4_" + mode + "_agnostic", horizon, seed_list(p, 10), cls, learner,
                               {{"kind", "realizable_margin"}, {"gamma", gamma}, {"flip_rate", p.value("flip_rate", 0.2)}},
                               bench, bound));
  }
  bool ok = run_upper_bound(cfgs, ctx, m, detail);

  // Exhaustive cover audit: every cell representative plus a 10^4 theta grid.
  const auto z = build_interval_cover(gamma / (2.0 * lipschitz_constant(sigma)));
  const auto q = build_quantized_cover(z, sigma, gamma);
  std::vector<double> members = q.thetas;
  for (int i = 0; i <= 10'000; ++i) members.push_back(i / 10'000.0);
  const auto audit = audit_quantized_cover(q, z, sigma, members);
  m["gquarter_audit"] = {{"members", audit.members}, {"worst", audit.worst}, {"cover_size", q.values.size()}, {"Z", z.size()}};
  detail += "; Gquarter audit worst=" + fmt(audit.worst, 4) + " <= " + fmt(gamma / 4.0, 4);
  return ok && audit.pass;
}

// AC-5 ---------------------------------------------------------------------------------
inline bool ac5(const json& p, const SuiteContext& ctx, json& m, std::string& detail) {
  const double gamma = p.value("gamma", 0.1);
  const auto cfg = make_config("ac5_perceptron", p.value("T", std::size_t{10'000}), seed_list(p, 20),
                               {{"kind", "halfspaces"}, {"dim", 2}, {"norm", "l2"}}, {{"kind", "perceptron"}},
                               {{"kind", "realizable_margin"}, {"gamma", gamma}}, {{"kind", "none"}},
                               {{"kind", "novikoff"}, {"radius", 1.0}, {"gamma", gamma}, {"scale", ctx.bound_scale}});
  const bool ok = run_upper_bound({cfg}, ctx, m, detail);
  detail = "max mistakes=" + detail.substr(detail.find('=') + 1);
  return ok;
}

// AC-6 ---------------------------------------------------------------------------------
inline bool ac6(const json& p, const SuiteContext& ctx, json& m, std::string& detail) {
  const int n = p.value("N", 64), d = p.value("d", 4);
  const double alpha = p.value("alpha", 0.003), constant = p.value("constant", 0.3);
  const auto horizon = p.value("T", std::size_t{1} << 14);
  const json stream = {{"kind", "mistake_tree"}, {"N", n}, {"d", d}, {"alpha", alpha}};
  const json cls = {{"kind", "multi_thresholds"}, {"N", n}, {"d", d}};
  const json bench = {{"kind", "pert"}, {"gamma", alpha}};
  const double depth = d * std::floor(std::log2(static_cast<double>(n / d)));
  const double target = constant * std::sqrt(static_cast<double>(horizon) * depth);
  bool ok = true;
  std::string parts;
  for (const std::string learner : {"perturbation", "halving"}) {
    auto cfg = make_config("ac6_" + learner, horizon, seed_list(p, 100), cls, {{"kind", learner}, {"gamma", alpha}},
                           stream, bench, {{"kind", "none"}});
    const auto s = run_experiment(cfg, ctx.threads);
    double mean = 0.0;
    std::size_t audit_failures = 0;
    for (const auto& r : s.seeds) {
      mean += r.excess;
      audit_failures += r.extra.at("tree_audit_failures").get<std::size_t>();
    }
    mean /= static_cast<double>(s.seeds.size());
    m[cfg.name] = {{"mean_regret", mean}, {"audit_failures", audit_failures}, {"seeds", s.seeds.size()}};
    ok = ok && mean >= target && audit_failures == 0;
    parts += (parts.empty() ? "" : ", ") + learner + " mean regret=" + fmt(mean, 1) +
             (audit_failures ? " (path audit FAILED)" : "");
  }
  m["target"] = target;
  m["depth"] = depth;
  detail = parts + " >= " + fmt(target, 1) + " (depth " + fmt(depth, 0) + ")";
  return ok;
}

// AC-7 ---------------------------------------------------------------------------------
inline bool ac7(const json& p, const SuiteContext&, json& m, std::string& detail) {
  const double sigma = p.value("sigma", 0.5), eps = p.value("epsilon", 0.4);
  const auto count = p.value("sequences", std::size_t{50});
  const auto horizon = p.value("T", std::size_t{20});
  const double gamma = gauss_margin(sigma, eps);
  CounterRng rng(p.value("seed", std::uint64_t{7}), 0xac07ULL);
  const auto domain = Domain::ball(2, Norm::l2, 1.0);
  std::size_t equal = 0;
  json values = json::array();
  for (std::size_t s = 0; s < count; ++s) {
    Sequence seq{domain, {}};
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Point w{std::cos(a), std::sin(a)};
    for (std::size_t t = 0; t < horizon; ++t) {
      Point x = sample_uniform(domain, rng);
      int y = dot(w, x) >= 0.0 ? 1 : -1;
      if (rng.bernoulli(0.2)) y = -y;
      seq.items.push_back({std::move(x), y});
    }
    const auto r = check_halfspace_equivalence(seq, 2, gamma, sigma, eps);
    equal += r.equal();
    values.push_back({r.margin, r.pert, r.gauss});
  }
  m["gamma"] = gamma;
  m["values"] = values;
  detail = std::to_string(equal) + "/" + std::to_string(count) + " sequences with margin=pert=gauss at gamma=" + fmt(gamma, 6);
  return equal == count;
}

// AC-8 ---------------------------------------------------------------------------------
inline bool ac8(const json& p, const SuiteContext&, json& m, std::string& detail) {
  const auto count = p.value("instances", std::size_t{100});
  const double tol = p.value("tolerance", 1e-9);
  CounterRng rng(p.value("seed", std::uint64_t{8}), 0xac08ULL);
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t inst = 0; inst < count; ++inst) {
    const std::size_t n = 1 + rng.below(8), horizon = 1 + rng.below(50);
    std::vector<std::vector<double>> loss(horizon, std::vector<double>(n));
    const bool binary = rng.bernoulli(0.5);
    for (auto& row : loss)
      for (auto& l : row) l = binary ? static_cast<double>(rng.bernoulli(0.5)) : rng.uniform();
    std::vector<double> totals(n, 0.0);
    for (const auto& row : loss)
      for (std::size_t i = 0; i < n; ++i) totals[i] += row[i];
    const double opt = *std::min_element(totals.begin(), totals.end());
    const double ln_n = std::log(static_cast<double>(n));
    for (double eta : {default_eta(ln_n, horizon), tuned_eta(ln_n, opt)}) {
      auto st = mw_init(n, eta);
      double realized = 0.0;
      for (const auto& row : loss) {
        realized += st.expected(row);
        mw_update_in_place(st, row);
      }
      const double bound = mw_loss_bound(eta, opt, ln_n);
      worst_slack = std::min(worst_slack, bound - realized);
      if (realized > bound + tol) ++violations;
    }
  }
  m["violations"] = violations;
  m["min_slack"] = worst_slack;
  detail = std::to_string(violations) + " violations over " + std::to_string(2 * count) +
           " (instance, eta) pairs; min slack=" + fmt(worst_slack, 6);
  return violations == 0;
}

/// Five-point central difference of the smoothed threshold at x = theta.
inline double threshold_slope_at_theta(double theta, double sigma) {
  const double h = 1e-3 * sigma;
  auto v = [&](double x) { return threshold_smoothed(theta, x, sigma); };
  return (-v(theta + 2 * h) + 8 * v(theta + h) - 8 * v(theta - h) + v(theta - 2 * h)) / (12 * h);
}

// AC-9 ---------------------------------------------------------------------------------
inline bool ac9(const json& p, const SuiteContext&, json& m, std::string& detail) {
  const auto pairs = p.value("pairs", std::size_t{10'000});
  bool ok = true;
  std::string parts;
  for (double sigma : p.value("sigmas", std::vector<double>{0.05, 0.2, 1.0})) {
    CounterRng trng(p.value("seed", std::uint64_t{9}), 0xac09ULL);
    const double theta = trng.uniform(0.25, 0.75);
    auto value = [&](const Point& x) { return threshold_smoothed(theta, x[0], sigma); };
    // Half the points near theta (where the slope peaks), half anywhere in [0,1].
    auto sample = [&](CounterRng& r) -> Point {
      return {r.bernoulli(0.5) ? theta + sigma * r.uniform(-3.0, 3.0) : r.uniform()};
    };
    const auto rep = check_lipschitz(value, sample, sigma, pairs, p.value("seed", std::uint64_t{9}) + 1);
    const double slope = threshold_slope_at_theta(theta, sigma);
    const double gap = std::abs(slope - lipschitz_constant(sigma));
    m["sigma_" + fmt(sigma, 2)] = {{"violations", rep.violations}, {"max_ratio", rep.max_ratio},
                                   {"constant", rep.constant}, {"slope_at_theta", slope}, {"slope_gap", gap}};
    ok = ok && rep.pass() && gap <= 1e-9;
    parts += (parts.empty() ? "" : "; ") + std::string("sigma=") + fmt(sigma, 2) + ": " +
             std::to_string(rep.violations) + " violations, |slope-L|=" + fmt(gap * 1e12, 2) + "e-12";
  }
  detail = parts;
  return ok;
}

// AC-10 --------------------------------------------------------------------------------
inline bool ac10(const json& p, const SuiteContext&, json& m, std::string& detail) {
  const double sigma = p.value("sigma", 0.3), eps = p.value("epsilon", 0.2);
  const auto count = p.value("sequences", std::size_t{50});
  const auto horizon = p.value("T", std::size_t{30});
  CounterRng rng(p.value("seed", std::uint64_t{10}), 0xac10ULL);
  std::size_t held = 0, total = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  const auto cls = HypothesisClass::thresholds();
  for (std::size_t s = 0; s < count; ++s) {
    Sequence seq{Domain::interval01(), {}};
    const double th = rng.uniform(0.2, 0.8);
    const bool realizable = s % 2 == 0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const double x = rng.uniform();
      int y = x > th ? 1 : -1;
      if (!realizable && rng.bernoulli(0.2)) y = -y;
      seq.items.push_back({{x}, y});
    }
    for (double e : {eps, 1.0 / (static_cast<double>(horizon) * static_cast<double>(horizon))}) {
      const auto r = check_gauss_comparison(seq, cls, sigma, e);
      held += r.holds;
      ++total;
      min_gap = std::min(min_gap, 2.0 * r.opt_smoothed + r.horizon * e - r.opt_gauss);
    }
  }
  m["held"] = held;
  m["total"] = total;
  m["min_gap"] = min_gap;
  detail = std::to_string(held) + "/" + std::to_string(total) + " instances satisfy OPT_gauss <= 2*OPT~ + T*eps; min gap=" +
           fmt(min_gap, 3);
  return held == total;
}

/// Fixed (domain, gamma) matrix for the duality check.
inline std::vector<std::pair<Domain, double>> duality_matrix() {
  const auto i01 = Domain::interval01();
  return {{i01, 0.05},
          {i01, 0.1},
          {i01, 0.25},
          {i01, 0.5},
          {Domain::ball(1, Norm::l2, 1.0), 0.25},
          {Domain::ball(1, Norm::l2, 1.0), 1.0},
          {Domain::ball(2, Norm::linf, 1.0), 0.5},
          {Domain::ball(2, Norm::linf, 1.0), 0.25},
          {Domain::ball(2, Norm::l2, 1.0), 0.5},
          {Domain::ball(2, Norm::l2, 1.0), 0.25},
          {Domain::ball(2, Norm::l1, 1.0), 0.5},
          {Domain::ball(3, Norm::linf, 1.0), 0.5}};
}

// AC-11 --------------------------------------------------------------------------------
inline bool ac11(const json& p, const SuiteContext&, json& m, std::string& detail) {
  const auto pool = p.value("pool_size", std::size_t{10'001});
  std::size_t passed = 0;
  json cases = json::array();
  const auto matrix = duality_matrix();
  for (const auto& [domain, gamma] : matrix) {
    const auto r = check_duality(domain, gamma, pool, p.value("seed", std::uint64_t{11}));
    passed += r.pass;
    cases.push_back(r);
  }
  m["cases"] = cases;
  detail = std::to_string(passed) + "/" + std::to_string(matrix.size()) + " (domain, gamma) cases satisfy |P(2g)| <= |C(g)| <= |P(g)|";
  return passed == matrix.size();
}

inline const std::map<std::string, std::function<bool(const json&, const SuiteContext&, json&, std::string&)>>&
registry() {
  static const std::map<std::string, std::function<bool(const json&, const SuiteContext&, json&, std::string&)>> r{
      {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3}, {"AC-4", ac4},  {"AC-5", ac5},  {"AC-6", ac6},
      {"AC-7", ac7}, {"AC-8", ac8}, {"AC-9", ac9}, {"AC-10", ac10}, {"AC-11", ac11}};
  return r;
}

}  // namespace acceptance

struct SuiteOptions {
  std::set<std::string> tags;  // empty: run everything
  unsigned threads = 1;
  std::optional<double> bound_scale;  // overrides the suite file
};

struct SuiteReport {
  std::vector<CriterionResult> results;
  bool all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
  }
  int exit_code() const { return all_pass() ? 0 : 1; }
};

inline CriterionResult run_criterion(const std::string& id, const json& params, const SuiteContext& ctx) {
  const auto& reg = acceptance::registry();
  const auto it = reg.find(id);
  if (it == reg.end()) throw Error(ErrorKind::usage, "unknown criterion '" + id + "'");
  CriterionResult r;
  r.id = id;
  const auto t0 = std::chrono::steady_clock::now();
  r.pass = it->second(params, ctx, r.metrics, r.detail);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!acceptance::within_budget(r.seconds, params, r.detail)) r.pass = false;
  return r;
}

/// Suite file: {"bound_scale": 1.0, "criteria": [{"id", "tags": [...], "params": {...}}, ...]}.
/// Each finished criterion is reported through `on_result` as it completes.
inline SuiteReport run_acceptance_suite(const std::filesystem::path& path, const SuiteOptions& opt = {},
                                        const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot open suite file " + path.string());
  json suite;
  try {
    in >> suite;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, "malformed suite file: " + std::string(e.what()));
  }
  SuiteContext ctx;
  ctx.bound_scale = opt.bound_scale.value_or(suite.value("bound_scale", 1.0));
  ctx.threads = opt.threads;
  SuiteReport report;
  for (const auto& c : suite.at("criteria")) {
    const auto tags = c.value("tags", std::vector<std::string>{});
    if (!opt.tags.empty() && std::none_of(tags.begin(), tags.end(), [&](const std::string& t) { return opt.tags.count(t) > 0; }) &&
        opt.tags.count(c.at("id").get<std::string>()) == 0)
      continue;
    auto r = run_criterion(c.at("id").get<std::string>(), c.value("params", json::object()), ctx);
    if (on_result) on_result(r);
    report.results.push_back(std::move(r));
  }
  return report;
}

inline std::string format_result_line(const CriterionResult& r) {
  return r.id + (r.pass ? " PASS " : " FAIL ") + r.detail + " [" + acceptance::fmt(r.seconds, 2) + "s]";
}

inline json report_json(const SuiteReport& rep) {
  json out = {{"pass", rep.all_pass()}, {"criteria", json::array()}};
  for (const auto& r : rep.results)
    out["criteria"].push_back({{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}, {"metrics", r.metrics}});
  return out;
}

}  // namespace relaxed
