#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "relaxed/adversary.hpp"
#include "relaxed/benchmarks.hpp"
#include "relaxed/error.hpp"
#include "relaxed/hypothesis.hpp"
#include "relaxed/learners.hpp"
#include "relaxed/sequence.hpp"

namespace relaxed {

using nlohmann::json;

// Configuration -------------------------------------------------------------------------

/// Experiment file schema (JSON):
///   name, T, seeds (list, or {"start", "count"}),
///   class     {kind: thresholds01|multi_thresholds|halfspaces, sigma?, dim?, norm?, N?, d?}
///   learner   {kind: perturbation|gaussian|margin|halfspace_cover|perceptron|halving,
///              gamma?, sigma?, epsilon?, cover_mode?, radius?, sample_constant?}
///   stream    {kind: realizable_pert|realizable_gauss|realizable_margin|mistake_tree,
///              gamma?, sigma?, epsilon?, flip_rate?, radius?, alpha?, class?}
///   benchmark {kind: pert|gauss|margin|hinge|none, gamma?, sigma?, epsilon?}
///   bound     {kind: cover_mw|experts|novikoff|none, scale?, radius?, gamma?}
///   checkpoints (optional list of t for the overlay CSV)
struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t horizon = 1;
  std::vector<std::uint64_t> seeds;
  json cls;
  json learner;
  json stream;
  json benchmark;
  json bound;
  std::vector<std::size_t> checkpoints;
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorKind::usage, where + ": missing '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace detail

inline ExperimentConfig parse_experiment(const json& j) {
  ExperimentConfig c;
  c.name = detail::get_or<std::string>(j, "name", "experiment");
  c.horizon = j.at("T").get<std::size_t>();
  if (c.horizon < 1) throw Error(ErrorKind::usage, "T must be >= 1");
  const auto& s = j.at("seeds");
  if (s.is_array()) {
    c.seeds = s.get<std::vector<std::uint64_t>>();
  } else {
    const auto start = s.at("start").get<std::uint64_t>();
    const auto count = s.at("count").get<std::size_t>();
    for (std::size_t i = 0; i < count; ++i) c.seeds.push_back(start + i);
  }
  if (c.seeds.empty()) throw Error(ErrorKind::usage, "at least one seed is required");
  c.cls = j.at("class");
  c.learner = j.at("learner");
  c.stream = j.at("stream");
  c.benchmark = j.value("benchmark", json{{"kind", "none"}});
  c.bound = j.value("bound", json{{"kind", "none"}});
  c.checkpoints = j.value("checkpoints", std::vector<std::size_t>{});
  return c;
}

inline ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, "malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_experiment(j);
}

/// Evenly spaced multi-threshold packing {(j + 1/2)/N}.
inline PackingSet uniform_packing(int n) {
  if (n < 1) throw Error(ErrorKind::usage, "N must be >= 1");
  PackingSet p{Domain::interval01(), 1.0 / n, {}};
  for (int j = 0; j < n; ++j) p.points.push_back({(j + 0.5) / n});
  return p;
}

inline HypothesisClass parse_class(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  HypothesisClass c;
  if (kind == "thresholds01") {
    c = HypothesisClass::thresholds();
  } else if (kind == "halfspaces") {
    c = HypothesisClass::halfspaces(j.at("dim").get<int>(), parse_norm(detail::get_or<std::string>(j, "norm", "l2")));
  } else if (kind == "multi_thresholds") {
    c = build_multi_threshold_class(uniform_packing(j.at("N").get<int>()), j.at("d").get<int>());
  } else {
    throw Error(ErrorKind::usage, "unknown class kind '" + kind + "'");
  }
  if (j.contains("sigma")) c = c.smoothed(j.at("sigma").get<double>());
  return c;
}

inline Domain domain_for(const HypothesisClass& c, double radius = 1.0) {
  if (c.kind == HypothesisClass::Kind::halfspaces) return Domain::ball(c.dim, c.metric, radius);
  return Domain::interval01();
}

// Per-seed pipeline ---------------------------------------------------------------------

struct OverlayRow {
  std::size_t t = 0;
  double excess = 0.0;
  double bound = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  double learner_loss = 0.0;
  std::size_t sampled_mistakes = 0;
  std::optional<BenchmarkValue> benchmark;
  double excess = 0.0;
  double bound = 0.0;
  bool bound_satisfied = true;
  double ln_experts = 0.0;
  std::size_t flips = 0;
  double wall_seconds = 0.0;
  json extra = json::object();
  std::vector<RoundRecord> trace;
  std::vector<OverlayRow> overlay;
};

struct ExperimentSummary {
  std::string name;
  std::vector<SeedResult> seeds;

  bool all_bounds_satisfied() const {
    return std::all_of(seeds.begin(), seeds.end(), [](const SeedResult& s) { return s.bound_satisfied; });
  }
  double mean_excess() const {
    double s = 0.0;
    for (const auto& r : seeds) s += r.excess;
    return seeds.empty() ? 0.0 : s / static_cast<double>(seeds.size());
  }
};

struct BuiltLearner {
  std::unique_ptr<OnlineLearner> learner;
  std::size_t cover_size = 0;
  json info = json::object();
};

inline BuiltLearner build_learner(const json& spec, const HypothesisClass& c, const Domain& domain,
                                  std::size_t horizon, std::uint64_t seed) {
  const auto kind = spec.at("kind").get<std::string>();
  BuiltLearner b;
  if (kind == "perturbation") {
    const double gamma = detail::require_number(spec, "gamma", "learner");
    b.learner = make_perturbation_learner(c, domain, gamma, horizon, seed);
    if (auto* p = dynamic_cast<PerturbationLearner*>(b.learner.get())) b.cover_size = p->cover().size();
    if (auto* p = dynamic_cast<FactoredPerturbationLearner*>(b.learner.get())) b.cover_size = p->cover().size();
  } else if (kind == "gaussian") {
    GaussianLearnerOptions opt;
    opt.sample_constant = detail::get_or<double>(spec, "sample_constant", 8.0);
    auto g = make_gaussian_learner(c, domain, detail::require_number(spec, "sigma", "learner"),
                                   detail::require_number(spec, "epsilon", "learner"), horizon, seed, opt);
    b.cover_size = g->cover().size();
    double worst = 0.0;
    for (double a : g->setup().audit) worst = std::max(worst, a);
    b.info = {{"eps_tilde", g->setup().eps_tilde},
              {"cover_scale", g->setup().gamma},
              {"samples_per_point", g->setup().samples_per_point},
              {"audit_worst", worst},
              {"audit_pass", worst <= g->setup().eps_tilde},
              {"doublings", g->setup().doublings}};
    b.learner = std::move(g);
  } else if (kind == "margin") {
    const auto mode = parse_cover_mode(detail::get_or<std::string>(spec, "cover_mode", "G0"));
    auto m = make_margin_learner(c, detail::require_number(spec, "gamma", "learner"), horizon, mode, seed);
    b.cover_size = m->cover().size();
    b.info = {{"cover_mode", to_string(mode)}, {"lipschitz", m->lipschitz()}};
    b.learner = std::move(m);
  } else if (kind == "halfspace_cover") {
    if (c.kind != HypothesisClass::Kind::halfspaces) throw Error(ErrorKind::usage, "halfspace_cover needs a halfspace class");
    auto h = make_halfspace_learner(c.dim, c.metric, detail::get_or<double>(spec, "radius", domain.radius),
                                    detail::require_number(spec, "gamma", "learner"), horizon, seed);
    b.cover_size = h->dual_cover().size();
    b.info = {{"beta", h->beta()}, {"log_constant", h->dual_cover().log_constant}};
    b.learner = std::move(h);
  } else if (kind == "perceptron") {
    if (c.kind != HypothesisClass::Kind::halfspaces) throw Error(ErrorKind::usage, "perceptron needs a halfspace class");
    b.learner = std::make_unique<Perceptron>(c.dim);
  } else if (kind == "halving") {
    auto cover = build_cover(domain, detail::require_number(spec, "gamma", "learner"));
    b.cover_size = cover.size();
    if (c.kind == HypothesisClass::Kind::multi_thresholds) {
      auto f = project_factored(c, cover.points);
      b.learner = std::make_unique<FactoredHalving>(std::move(cover), std::move(f));
    } else {
      auto e = project_class(c, cover.points);
      b.learner = std::make_unique<Halving>(std::move(cover), std::move(e));
    }
  } else {
    throw Error(ErrorKind::usage, "unknown learner kind '" + kind + "'");
  }
  b.info["ln_experts"] = b.learner->ln_experts();
  b.info["cover_size"] = b.cover_size;
  return b;
}

struct BuiltStream {
  GeneratedStream stream;
  std::size_t tree_depth = 0;
  std::size_t tree_audit_failures = 0;
  std::optional<HypothesisClass> tree_class;
};

inline BuiltStream build_stream(const json& spec, const HypothesisClass& c, const Domain& domain,
                                std::size_t horizon, std::uint64_t seed) {
  const auto kind = parse_stream_kind(spec.at("kind").get<std::string>());
  BuiltStream b;
  if (kind == StreamKind::mistake_tree) {
    auto tree = build_mistake_tree(spec.at("d").get<int>(), spec.at("N").get<int>(),
                                   detail::require_number(spec, "alpha", "stream"), seed);
    b.stream = gen_mistake_tree(tree, horizon);
    b.tree_depth = static_cast<std::size_t>(tree.depth());
    b.tree_audit_failures = tree.audit_failures();
    b.tree_class = tree.hypothesis_class();
  } else {
    RealizableSpec r;
    r.kind = kind;
    r.cls = spec.contains("class") ? parse_class(spec.at("class")) : c;
    r.domain = spec.contains("class") ? domain_for(r.cls, detail::get_or<double>(spec, "radius", domain.radius)) : domain;
    r.gamma = detail::get_or<double>(spec, "gamma", 0.0);
    r.sigma = detail::get_or<double>(spec, "sigma", 0.0);
    r.epsilon = detail::get_or<double>(spec, "epsilon", 0.0);
    b.stream = gen_realizable(r, horizon, seed);
  }
  const double p = detail::get_or<double>(spec, "flip_rate", 0.0);
  if (p > 0.0) b.stream = gen_agnostic(std::move(b.stream), p, seed);
  return b;
}

inline std::optional<BenchmarkValue> evaluate_benchmark(const json& spec, const Sequence& seq,
                                                        const HypothesisClass& c) {
  const auto kind = spec.at("kind").get<std::string>();
  if (kind == "none") return std::nullopt;
  if (kind == "pert") return opt_pert(seq, c, detail::require_number(spec, "gamma", "benchmark"));
  if (kind == "gauss")
    return opt_gauss(seq, c, detail::require_number(spec, "sigma", "benchmark"),
                     detail::require_number(spec, "epsilon", "benchmark"));
  if (kind == "margin") return opt_margin(seq, c, detail::require_number(spec, "gamma", "benchmark"));
  if (kind == "hinge") return opt_hinge(seq, c.dim, detail::require_number(spec, "gamma", "benchmark"));
  throw Error(ErrorKind::usage, "unknown benchmark kind '" + kind + "'");
}

/// Upper bound on the excess at horizon t, from the realized cover and expert counts.
inline double bound_at(const json& spec, std::size_t t, const HypothesisClass& c, const BuiltLearner& l) {
  const auto kind = spec.at("kind").get<std::string>();
  const double scale = detail::get_or<double>(spec, "scale", 1.0);
  const double tt = static_cast<double>(t);
  if (kind == "none") return std::numeric_limits<double>::infinity();
  if (kind == "cover_mw") {
    const double vc = vc_dimension(c);
    return scale * std::sqrt(tt * vc * std::log(std::numbers::e * static_cast<double>(l.cover_size) / vc));
  }
  if (kind == "experts") return scale * std::sqrt(tt * l.learner->ln_experts());
  if (kind == "novikoff") {
    const double r = detail::require_number(spec, "radius", "bound"), g = detail::require_number(spec, "gamma", "bound");
    return scale * (r / g) * (r / g);
  }
  throw Error(ErrorKind::usage, "unknown bound kind '" + kind + "'");
}

struct RunOptions {
  bool keep_trace = false;
  bool overlay = true;
};

inline SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  SeedResult r;
  r.seed = seed;
  r.horizon = cfg.horizon;
  HypothesisClass cls = parse_class(cfg.cls);
  const Domain domain = domain_for(cls, detail::get_or<double>(cfg.stream, "radius", 1.0));
  auto stream = build_stream(cfg.stream, cls, domain, cfg.horizon, seed);
  if (stream.tree_class) cls = *stream.tree_class;
  auto built = build_learner(cfg.learner, cls, domain, cfg.horizon, splitmix64(seed ^ 0x6c6561726e6572ULL));
  r.flips = stream.stream.flips;
  r.ln_experts = built.learner->ln_experts();
  r.extra = built.info;
  if (stream.tree_depth > 0) {
    r.extra["tree_depth"] = stream.tree_depth;
    r.extra["tree_audit_failures"] = stream.tree_audit_failures;
  }

  auto* halving = dynamic_cast<Halving*>(built.learner.get());
  auto* fhalving = dynamic_cast<FactoredHalving*>(built.learner.get());
  std::vector<double> cum;
  cum.reserve(cfg.horizon);
  const auto& items = stream.stream.seq.items;
  for (std::size_t t = 0; t < items.size(); ++t) {
    // Tree replays restart the realizable promise, so Halving starts afresh.
    if (stream.tree_depth > 0 && t % stream.tree_depth == 0) {
      if (halving) halving->reset();
      if (fhalving) fhalving->reset();
    }
    auto rec = built.learner->round(items[t].x, items[t].y);
    cum.push_back(rec.cumulative_expected_loss);
    if (opt.keep_trace) r.trace.push_back(std::move(rec));
  }
  r.learner_loss = built.learner->cumulative_expected_loss();
  r.sampled_mistakes = built.learner->cumulative_mistakes();

  r.benchmark = evaluate_benchmark(cfg.benchmark, stream.stream.seq, cls);
  r.excess = r.learner_loss - (r.benchmark ? r.benchmark->value : 0.0);
  r.bound = bound_at(cfg.bound, cfg.horizon, cls, built);
  r.bound_satisfied = r.excess <= r.bound;

  if (opt.overlay && !cfg.checkpoints.empty()) {
    for (std::size_t t : cfg.checkpoints) {
      if (t < 1 || t > items.size()) continue;
      Sequence prefix{stream.stream.seq.domain, {items.begin(), items.begin() + static_cast<std::ptrdiff_t>(t)}};
      const auto b = evaluate_benchmark(cfg.benchmark, prefix, cls);
      r.overlay.push_back({t, cum[t - 1] - (b ? b->value : 0.0), bound_at(cfg.bound, t, cls, built)});
    }
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs every seed on up to `threads` workers; results sorted by seed.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, unsigned threads = 1,
                                        const RunOptions& opt = {}) {
  ExperimentSummary s;
  s.name = cfg.name;
  s.seeds.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cfg.seeds.size();) {
      try {
        s.seeds[i] = run_seed(cfg, cfg.seeds[i], opt);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.seeds.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      throw Error(e.kind(), "experiment '" + cfg.name + "': " + e.what());
    }
  }
  std::sort(s.seeds.begin(), s.seeds.end(), [](const SeedResult& a, const SeedResult& b) { return a.seed < b.seed; });
  return s;
}

// Output --------------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& os, const std::vector<RoundRecord>& trace) {
  os << "t,y_true,y_hat,expected_loss,cumulative_expected_loss,cumulative_sampled_mistakes\n";
  for (const auto& r : trace)
    os << r.t << ',' << r.y_true << ',' << r.y_hat << ',' << format_double(r.expected_loss) << ','
       << format_double(r.cumulative_expected_loss) << ',' << r.cumulative_sampled_mistakes << '\n';
}

/// Columns: seed, T, excess, bound.
inline void emit_bound_overlay(std::ostream& os, const ExperimentSummary& s) {
  os << "seed,T,excess,bound\n";
  for (const auto& r : s.seeds)
    for (const auto& o : r.overlay)
      os << r.seed << ',' << o.t << ',' << format_double(o.excess) << ',' << format_double(o.bound) << '\n';
}

inline json summary_json(const ExperimentSummary& s) {
  json seeds = json::array();
  for (const auto& r : s.seeds) {
    json e = {{"seed", r.seed},
              {"T", r.horizon},
              {"learner_loss", r.learner_loss},
              {"sampled_mistakes", r.sampled_mistakes},
              {"excess", r.excess},
              {"bound", std::isfinite(r.bound) ? json(r.bound) : json(nullptr)},
              {"bound_satisfied", r.bound_satisfied},
              {"ln_experts", r.ln_experts},
              {"flips", r.flips},
              {"wall_seconds", r.wall_seconds},
              {"learner_info", r.extra}};
    if (r.benchmark) e["benchmark"] = *r.benchmark;
    seeds.push_back(std::move(e));
  }
  return {{"name", s.name}, {"all_bounds_satisfied", s.all_bounds_satisfied()}, {"mean_excess", s.mean_excess()},
          {"seeds", seeds}};
}

/// Writes summary.json, overlay.csv and one trace CSV per seed under out_dir/name.
inline std::filesystem::path write_outputs(const ExperimentSummary& s, const std::filesystem::path& out_dir) {
  const auto dir = out_dir / s.name;
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "summary.json");
    f << summary_json(s).dump(2) << '\n';
  }
  {
    std::ofstream f(dir / "overlay.csv");
    emit_bound_overlay(f, s);
  }
  for (const auto& r : s.seeds) {
    if (r.trace.empty()) continue;
    std::ofstream f(dir / ("trace_seed" + std::to_string(r.seed) + ".csv"));
    write_trace_csv(f, r.trace);
  }
  return dir;
}

}  // namespace relaxed
