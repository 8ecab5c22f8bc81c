// Command-line front end: run, suite, bench, cover.
// Exit codes: 0 success, 1 a checked criterion failed, 2 usage or config error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relaxed/relaxed.hpp"

namespace {

using namespace relaxed;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Seed override (replaces the seed list for run; RNG seed for cover)");
  sub->add_option("--out-dir", c.out_dir, "Directory for CSV/JSON outputs");
  sub->add_option("--threads", c.threads, "Worker threads for seeds")->check(CLI::Range(1u, 256u));
}

void write_json(const std::string& out_dir, const std::string& file, const json& j) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream f(std::filesystem::path(out_dir) / file);
  f << j.dump(2) << '\n';
}

int cmd_run(const std::string& config, const Common& c, bool trace) {
  auto cfg = load_experiment(config);
  if (c.seed) cfg.seeds = {*c.seed};
  RunOptions opt;
  opt.keep_trace = trace || !c.out_dir.empty();
  const auto s = run_experiment(cfg, c.threads, opt);
  for (const auto& r : s.seeds) {
    std::cout << cfg.name << " seed=" << r.seed << " loss=" << format_double(r.learner_loss)
              << " benchmark=" << (r.benchmark ? format_double(r.benchmark->value) : std::string("-"))
              << " excess=" << format_double(r.excess) << " bound=" << format_double(r.bound)
              << (r.bound_satisfied ? " ok" : " VIOLATED") << '\n';
  }
  if (!c.out_dir.empty()) std::cout << "wrote " << write_outputs(s, c.out_dir).string() << '\n';
  return s.all_bounds_satisfied() ? 0 : 1;
}

int cmd_suite(const std::string& path, const Common& c, const std::vector<std::string>& tags,
              std::optional<double> bound_scale, const std::string& report) {
  SuiteOptions opt;
  opt.tags = {tags.begin(), tags.end()};
  opt.threads = c.threads;
  opt.bound_scale = bound_scale;
  const auto rep = run_acceptance_suite(path, opt, [](const CriterionResult& r) {
    std::cout << format_result_line(r) << std::endl;
  });
  const auto j = report_json(rep);
  write_json(c.out_dir, "suite_report.json", j);
  if (!report.empty()) {
    std::ofstream f(report);
    f << j.dump(2) << '\n';
  }
  std::cout << (rep.all_pass() ? "SUITE PASS" : "SUITE FAIL") << '\n';
  return rep.exit_code();
}

int cmd_bench(const std::string& csv, const std::string& class_json, const std::string& bench_json, const Common& c) {
  const auto cls = parse_class(json::parse(class_json));
  const auto spec = json::parse(bench_json);
  std::ifstream in(csv);
  if (!in) throw Error(ErrorKind::usage, "cannot open sequence file " + csv);
  const auto seq = read_csv(in, domain_for(cls, spec.value("radius", 1.0)));
  const auto v = evaluate_benchmark(spec, seq, cls);
  if (!v) throw Error(ErrorKind::usage, "benchmark kind 'none' has no value");
  const json out = *v;
  std::cout << out.dump(2) << '\n';
  write_json(c.out_dir, "bench.json", out);
  return 0;
}

int cmd_cover(const std::string& domain_kind, int dim, const std::string& norm, double radius, double gamma,
              std::size_t pool, const Common& c) {
  Domain d = domain_kind == "interval01" ? Domain::interval01() : Domain::ball(dim, parse_norm(norm), radius);
  if (domain_kind != "interval01" && domain_kind != "ball")
    throw Error(ErrorKind::usage, "domain must be interval01 or ball");
  const auto cover = build_cover(d, gamma);
  const auto report = check_duality(d, gamma, pool, c.seed.value_or(0));
  const json out = {{"cover", cover}, {"duality", report}};
  std::cout << "domain=" << describe(d) << " gamma=" << format_double(gamma) << " |C|=" << cover.size()
            << " |P(2g)|=" << report.packing_2gamma << " |C(g)|=" << report.cover_gamma
            << " |P(g)|=" << report.packing_gamma << (report.pass ? " duality ok" : " duality FAILED") << '\n';
  write_json(c.out_dir, "cover.json", out);
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online classification against relaxed benchmarks"};
  app.require_subcommand(1);

  Common common;
  bool trace = false;
  std::string config, suite_path, report_path, csv, class_json = R"({"kind":"thresholds01"})", bench_json;
  std::vector<std::string> tags;
  std::optional<double> bound_scale;
  std::string domain_kind = "interval01", norm = "l2";
  int dim = 1;
  double radius = 1.0, gamma = 0.1;
  std::size_t pool = 10'001;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "Experiment JSON")->required();
  run->add_flag("--trace", trace, "Keep per-round traces");
  add_common(run, common);

  auto* suite = app.add_subcommand("suite", "Run the acceptance suite");
  suite->add_option("suite", suite_path, "Suite JSON")->required();
  suite->add_option("--tags", tags, "Only run criteria with one of these tags or ids")->delimiter(',');
  suite->add_option("--bound-scale", bound_scale, "Multiply every upper bound");
  suite->add_option("--report", report_path, "Write the JSON report here");
  add_common(suite, common);

  auto* bench = app.add_subcommand("bench", "Evaluate one benchmark on a CSV sequence");
  bench->add_option("csv", csv, "Sequence CSV (t,x0..,y)")->required();
  bench->add_option("--class", class_json, "Class JSON, e.g. {\"kind\":\"halfspaces\",\"dim\":2,\"norm\":\"l2\"}");
  bench->add_option("--benchmark", bench_json, "Benchmark JSON, e.g. {\"kind\":\"pert\",\"gamma\":0.05}")->required();
  add_common(bench, common);

  auto* cover = app.add_subcommand("cover", "Build a cover and report covering/packing duality");
  cover->add_option("--domain", domain_kind, "interval01 or ball");
  cover->add_option("--dim", dim, "Ball dimension");
  cover->add_option("--norm", norm, "l1, l2 or linf");
  cover->add_option("--radius", radius, "Ball radius");
  cover->add_option("--gamma", gamma, "Cover scale")->required();
  cover->add_option("--pool", pool, "Candidate pool size for greedy packing");
  add_common(cover, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return cmd_run(config, common, trace);
    if (*suite) return cmd_suite(suite_path, common, tags, bound_scale, report_path);
    if (*bench) return cmd_bench(csv, class_json, bench_json, common);
    if (*cover) return cmd_cover(domain_kind, dim, norm, radius, gamma, pool, common);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error [config]: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
