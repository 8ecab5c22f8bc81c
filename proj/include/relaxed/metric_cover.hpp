#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaxed/error.hpp"
#include "relaxed/rng.hpp"

namespace relaxed {

using Point = std::vector<double>;

enum class Norm { l1, l2, linf };

inline Norm dual(Norm p) {
  switch (p) {
    case Norm::l1: return Norm::linf;
    case Norm::linf: return Norm::l1;
    case Norm::l2: return Norm::l2;
  }
  return Norm::l2;
}

inline const char* to_string(Norm p) {
  switch (p) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
  }
  return "l2";
}

inline Norm parse_norm(const std::string& s) {
  if (s == "l1" || s == "1") return Norm::l1;
  if (s == "l2" || s == "2") return Norm::l2;
  if (s == "linf" || s == "inf") return Norm::linf;
  throw Error(ErrorKind::usage, "unknown norm '" + s + "'");
}

inline double norm(Norm p, std::span<const double> v) {
  double acc = 0.0;
  switch (p) {
    case Norm::l1:
      for (double a : v) acc += std::abs(a);
      return acc;
    case Norm::l2:
      for (double a : v) acc += a * a;
      return std::sqrt(acc);
    case Norm::linf:
      for (double a : v) acc = std::max(acc, std::abs(a));
      return acc;
  }
  return acc;
}

inline double distance(Norm p, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::shape, "dimension mismatch in distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    switch (p) {
      case Norm::l1: acc += d; break;
      case Norm::l2: acc += d * d; break;
      case Norm::linf: acc = std::max(acc, d); break;
    }
  }
  return p == Norm::l2 ? std::sqrt(acc) : acc;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::shape, "dimension mismatch in dot product");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Instance space: [0,1] with |.|, or a radius-B ball of an lp norm in R^d.
struct Domain {
  enum class Kind { interval01, ball };

  Kind kind = Kind::interval01;
  int dim = 1;
  Norm metric = Norm::l2;
  double radius = 1.0;

  static Domain interval01() { return Domain{}; }

  static Domain ball(int d, Norm p, double B) {
    if (d < 1) throw Error(ErrorKind::invalid_parameter, "ball dimension must be >= 1");
    if (!(B > 0.0)) throw Error(ErrorKind::invalid_parameter, "ball radius must be > 0");
    return Domain{Kind::ball, d, p, B};
  }

  double distance(std::span<const double> a, std::span<const double> b) const {
    return relaxed::distance(metric, a, b);
  }

  bool contains(std::span<const double> x, double tol = 1e-9) const {
    if (static_cast<int>(x.size()) != dim) return false;
    if (kind == Kind::interval01) return x[0] >= -tol && x[0] <= 1.0 + tol;
    return norm(metric, x) <= radius + tol;
  }

  double diameter() const { return kind == Kind::interval01 ? 1.0 : 2.0 * radius; }

  bool operator==(const Domain&) const = default;
};

inline std::string describe(const Domain& d) {
  if (d.kind == Domain::Kind::interval01) return "interval01";
  return "ball(d=" + std::to_string(d.dim) + "," + to_string(d.metric) +
         ",B=" + std::to_string(d.radius) + ")";
}

/// Uniform sample from the domain.
inline Point sample_uniform(const Domain& domain, CounterRng& rng) {
  if (domain.kind == Domain::Kind::interval01) return {rng.uniform()};
  const int d = domain.dim;
  Point x(static_cast<std::size_t>(d));
  switch (domain.metric) {
    case Norm::linf:
      for (auto& v : x) v = rng.uniform(-domain.radius, domain.radius);
      break;
    case Norm::l2: {
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (auto& v : x) {
          v = rng.normal();
          n2 += v * v;
        }
      } while (n2 == 0.0);
      const double r = domain.radius * std::pow(rng.uniform(), 1.0 / d) / std::sqrt(n2);
      for (auto& v : x) v *= r;
      break;
    }
    case Norm::l1: {
      // (E_1..E_d)/(E_1+..+E_{d+1}) is uniform on the solid simplex.
      double total = 0.0;
      for (auto& v : x) {
        v = rng.exponential();
        total += v;
      }
      total += rng.exponential();
      for (auto& v : x) v = rng.rademacher() * domain.radius * v / total;
      break;
    }
  }
  return x;
}

enum class Construction { grid, greedy, lattice, sphere };

inline const char* to_string(Construction c) {
  switch (c) {
    case Construction::grid: return "grid";
    case Construction::greedy: return "greedy";
    case Construction::lattice: return "lattice";
    case Construction::sphere: return "sphere";
  }
  return "grid";
}

inline Construction parse_construction(const std::string& s) {
  if (s == "grid") return Construction::grid;
  if (s == "greedy") return Construction::greedy;
  if (s == "lattice") return Construction::lattice;
  if (s == "sphere") return Construction::sphere;
  throw Error(ErrorKind::usage, "unknown construction '" + s + "'");
}

/// Finite gamma-cover of a domain. `log_constant` is the additive slack c_d
/// with ln|points| <= d ln(1 + 2B/gamma) + c_d guaranteed by the construction.
struct CoverSet {
  Domain domain;
  double scale = 0.0;
  std::vector<Point> points;
  Construction construction = Construction::grid;
  double log_constant = 0.0;

  std::size_t size() const { return points.size(); }
};

struct PackingSet {
  Domain domain;
  double scale = 0.0;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
};

namespace detail {

inline std::size_t ceil_count(double ratio) {
  // Absorb representation error, e.g. 1/(2*0.1) = 5.000000000000001.
  return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
}

inline double lattice_pitch(Norm p, int d, double gamma) {
  switch (p) {
    case Norm::l2: return 2.0 * gamma / std::sqrt(static_cast<double>(d));
    case Norm::linf: return 2.0 * gamma;
    case Norm::l1: return 2.0 * gamma / d;
  }
  return 2.0 * gamma;
}

/// kappa with covering radius of a pitch-h cube lattice = kappa * h / 2.
inline double lattice_kappa(Norm p, int d) {
  switch (p) {
    case Norm::l2: return std::sqrt(static_cast<double>(d));
    case Norm::linf: return 1.0;
    case Norm::l1: return static_cast<double>(d);
  }
  return 1.0;
}

/// Symmetric per-axis grid with `n` points of spacing `h`, centred on 0.
inline std::vector<double> axis_grid(std::size_t n, double h) {
  std::vector<double> g(n);
  const double first = -0.5 * static_cast<double>(n - 1) * h;
  for (std::size_t i = 0; i < n; ++i) g[i] = first + static_cast<double>(i) * h;
  return g;
}

/// Calls f(point) for every point of the product grid axis^d.
template <class F>
void for_each_lattice_point(const std::vector<double>& axis, int d, F&& f) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Point p(static_cast<std::size_t>(d));
  while (true) {
    for (int k = 0; k < d; ++k) p[k] = axis[idx[k]];
    f(p);
    int k = 0;
    while (k < d && ++idx[k] == axis.size()) idx[k++] = 0;
    if (k == d) break;
  }
}

inline constexpr std::size_t kMaxLatticePoints = 20'000'000;
inline constexpr std::uint64_t kProbeSeed = 0xc0fe5eedULL;

}  // namespace detail

/// Nearest cover point, smallest index on ties.
struct Projection {
  std::size_t index = 0;
  Point point;
};

inline std::size_t nearest_index(const CoverSet& cover, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cover.points.size(); ++i) {
    const double d = cover.domain.distance(x, cover.points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline Projection project_point(const CoverSet& cover, std::span<const double> x) {
  if (!cover.domain.contains(x))
    throw Error(ErrorKind::out_of_domain, "point outside " + describe(cover.domain));
  const std::size_t i = nearest_index(cover, x);
  return {i, cover.points[i]};
}

/// Max over probes of the distance to the nearest cover point.
inline double covering_radius_on(const CoverSet& cover, const std::vector<Point>& probes) {
  double worst = 0.0;
  for (const auto& x : probes) {
    const auto i = nearest_index(cover, x);
    worst = std::max(worst, cover.domain.distance(x, cover.points[i]));
  }
  return worst;
}

/// Grid {gamma, 3 gamma, 5 gamma, ...} clipped to [0,1]; ceil(1/(2 gamma)) points.
inline CoverSet build_interval_cover(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw Error(ErrorKind::invalid_scale, "interval cover needs 0 < gamma <= 1");
  const std::size_t n = detail::ceil_count(1.0 / (2.0 * gamma));
  CoverSet cover{Domain::interval01(), gamma, {}, Construction::grid, 0.0};
  cover.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    cover.points.push_back({std::min(1.0, (2.0 * static_cast<double>(k) + 1.0) * gamma)});
  return cover;
}

/// Cube lattice of pitch 2 gamma/kappa covering [-B,B]^d, restricted to the
/// ball dilated by gamma. Covering is re-verified on 10^4 uniform probes.
inline CoverSet build_ball_cover(const Domain& domain, double gamma, std::size_t probes = 10'000) {
  if (domain.kind != Domain::Kind::ball)
    throw Error(ErrorKind::invalid_parameter, "build_ball_cover needs a ball domain");
  if (!(gamma > 0.0) || gamma > domain.radius)
    throw Error(ErrorKind::invalid_scale, "ball cover needs 0 < gamma <= B");
  const int d = domain.dim;
  const double h = detail::lattice_pitch(domain.metric, d, gamma);
  // In l1 with d >= 2 the checkerboard sublattice (even index sum, origin
  // included) keeps the covering radius of the full cube lattice at half the
  // points. Its window must reach radius B + gamma so edge holes see a neighbour.
  const bool checkerboard = domain.metric == Norm::l1 && d >= 2;
  const std::size_t n = checkerboard ? 2 * detail::ceil_count((domain.radius + gamma) / h) + 1
                                     : detail::ceil_count(2.0 * domain.radius / h);
  if (std::pow(static_cast<double>(n), d) > static_cast<double>(detail::kMaxLatticePoints))
    throw Error(ErrorKind::resource, "lattice cover too large; raise gamma");

  CoverSet cover{domain, gamma, {}, Construction::lattice, 0.0};
  if (gamma >= domain.radius) {
    cover.points.push_back(Point(static_cast<std::size_t>(d), 0.0));
    return cover;
  }
  const auto axis = detail::axis_grid(n, h);
  const double keep = domain.radius + gamma + 1e-12;
  detail::for_each_lattice_point(axis, d, [&](const Point& p) {
    if (checkerboard) {
      long sum = 0;
      for (double c : p) sum += std::lround(c / h);
      if (sum % 2 != 0) return;
    }
    if (norm(domain.metric, p) <= keep) cover.points.push_back(p);
  });
  // n <= kappa B/gamma + 1 <= max(1,kappa/2) (1 + 2B/gamma) per axis. The
  // checkerboard's spare layers can exceed that at coarse scales, so the
  // constant is raised to the realized value when needed.
  cover.log_constant = std::max(d * std::log(std::max(1.0, detail::lattice_kappa(domain.metric, d) / 2.0)),
                                std::log(static_cast<double>(cover.points.size())) -
                                    d * std::log1p(2.0 * domain.radius / gamma));

  CounterRng rng(detail::kProbeSeed);
  std::vector<Point> sample;
  sample.reserve(probes);
  for (std::size_t i = 0; i < probes; ++i) sample.push_back(sample_uniform(domain, rng));
  if (covering_radius_on(cover, sample) > gamma + 1e-9)
    throw Error(ErrorKind::construction_failure, "lattice failed covering verification");
  return cover;
}

inline CoverSet build_cover(const Domain& domain, double gamma) {
  if (domain.kind == Domain::Kind::interval01) return build_interval_cover(gamma);
  return build_ball_cover(domain, gamma);
}

/// Random direction normalised to unit norm `p`.
inline Point sample_unit_sphere(int d, Norm p, CounterRng& rng) {
  Point w(static_cast<std::size_t>(d));
  double n = 0.0;
  do {
    for (auto& v : w) v = rng.normal();
    n = norm(p, w);
  } while (n == 0.0);
  for (auto& v : w) v /= n;
  return w;
}

/// beta-cover of the unit sphere {||w||_p = 1}: lattice points of a
/// beta/2-cover of the unit ball lying in the shell | ||z|| - 1 | <= beta/2,
/// radially normalised and deduplicated. Normalising moves a shell point by at
/// most beta/2, hence every sphere point is within beta of the result.
inline CoverSet build_sphere_cover(int d, Norm p, double beta, std::size_t probes = 1'000) {
  if (d < 1) throw Error(ErrorKind::invalid_parameter, "sphere dimension must be >= 1");
  if (!(beta > 0.0)) throw Error(ErrorKind::invalid_scale, "sphere cover needs beta > 0");
  const Domain ball = Domain::ball(d, p, 1.0);
  CoverSet cover{ball, beta, {}, Construction::sphere, 0.0};
  if (d == 1) {
    cover.points = {{-1.0}, {1.0}};
    return cover;
  }
  const double half = std::min(beta, 1.0) / 2.0;
  const double h = detail::lattice_pitch(p, d, half);
  const std::size_t n = detail::ceil_count(2.0 / h);
  if (std::pow(static_cast<double>(n), d) > static_cast<double>(detail::kMaxLatticePoints))
    throw Error(ErrorKind::resource, "sphere cover too large; raise beta");
  const auto axis = detail::axis_grid(n, h);
  detail::for_each_lattice_point(axis, d, [&](const Point& z) {
    const double r = norm(p, z);
    if (r > 0.0 && std::abs(r - 1.0) <= half + 1e-12) {
      Point u = z;
      for (auto& v : u) v /= r;
      cover.points.push_back(std::move(u));
    }
  });
  std::sort(cover.points.begin(), cover.points.end());
  cover.points.erase(std::unique(cover.points.begin(), cover.points.end()), cover.points.end());
  // Unpruned lattice at beta/2: n <= 2 kappa/beta + 1 <= max(1,kappa)(1 + 2/beta).
  cover.log_constant = d * std::log(std::max(1.0, detail::lattice_kappa(p, d)));

  CounterRng rng(detail::kProbeSeed + 1);
  std::vector<Point> sample;
  sample.reserve(probes);
  for (std::size_t i = 0; i < probes; ++i) sample.push_back(sample_unit_sphere(d, p, rng));
  if (covering_radius_on(cover, sample) > beta + 1e-9)
    throw Error(ErrorKind::construction_failure, "sphere cover failed verification");
  return cover;
}

/// Greedy farthest-point packing over a pool (uniform grid of pool_size points
/// on [0,1]; seeded uniform samples on balls). Pairwise distances > gamma and
/// maximal with respect to the pool.
inline PackingSet build_greedy_packing(const Domain& domain, double gamma,
                                       std::size_t pool_size = 10'001,
                                       std::uint64_t seed = 0) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_scale, "packing needs gamma > 0");
  if (pool_size < 1) throw Error(ErrorKind::invalid_parameter, "pool_size must be >= 1");
  std::vector<Point> pool;
  pool.reserve(pool_size);
  if (domain.kind == Domain::Kind::interval01) {
    for (std::size_t i = 0; i < pool_size; ++i)
      pool.push_back({pool_size == 1 ? 0.0
                                     : static_cast<double>(i) / static_cast<double>(pool_size - 1)});
  } else {
    CounterRng rng(seed);
    for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(sample_uniform(domain, rng));
  }

  PackingSet packing{domain, gamma, {}};
  std::vector<double> gap(pool.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  while (true) {
    packing.points.push_back(pool[next]);
    double far = -1.0;
    std::size_t far_i = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      gap[i] = std::min(gap[i], domain.distance(pool[i], pool[next]));
      if (gap[i] > far) {
        far = gap[i];
        far_i = i;
      }
    }
    if (!(far > gamma)) break;
    next = far_i;
  }
  return packing;
}

inline double min_pairwise_distance(const PackingSet& packing) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < packing.points.size(); ++i)
    for (std::size_t j = i + 1; j < packing.points.size(); ++j)
      best = std::min(best, packing.domain.distance(packing.points[i], packing.points[j]));
  return best;
}

struct DualityReport {
  Domain domain;
  double scale = 0.0;
  std::size_t packing_2gamma = 0;
  std::size_t cover_gamma = 0;
  std::size_t packing_gamma = 0;
  bool pass = false;
};

/// |P(2 gamma)| <= |C(gamma)| <= |P(gamma)| for the constructed instances.
inline DualityReport check_duality(const Domain& domain, double gamma,
                                   std::size_t pool_size = 10'001, std::uint64_t seed = 0) {
  DualityReport r{domain, gamma};
  r.packing_2gamma = build_greedy_packing(domain, 2.0 * gamma, pool_size, seed).size();
  r.cover_gamma = build_cover(domain, gamma).size();
  r.packing_gamma = build_greedy_packing(domain, gamma, pool_size, seed).size();
  r.pass = r.packing_2gamma <= r.cover_gamma && r.cover_gamma <= r.packing_gamma;
  return r;
}

// JSON ------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const Domain& d) {
  if (d.kind == Domain::Kind::interval01) {
    j = {{"kind", "interval01"}};
  } else {
    j = {{"kind", "ball"}, {"dim", d.dim}, {"norm", to_string(d.metric)}, {"radius", d.radius}};
  }
}

inline void from_json(const nlohmann::json& j, Domain& d) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "interval01") {
    d = Domain::interval01();
  } else if (kind == "ball") {
    d = Domain::ball(j.at("dim").get<int>(), parse_norm(j.value("norm", std::string("l2"))),
                     j.value("radius", 1.0));
  } else {
    throw Error(ErrorKind::usage, "unknown domain kind '" + kind + "'");
  }
}

inline void to_json(nlohmann::json& j, const CoverSet& c) {
  j = {{"domain", c.domain},
       {"scale", c.scale},
       {"construction", to_string(c.construction)},
       {"log_constant", c.log_constant},
       {"points", c.points}};
}

inline void from_json(const nlohmann::json& j, CoverSet& c) {
  c.domain = j.at("domain").get<Domain>();
  c.scale = j.at("scale").get<double>();
  c.construction = parse_construction(j.at("construction").get<std::string>());
  c.log_constant = j.value("log_constant", 0.0);
  c.points = j.at("points").get<std::vector<Point>>();
}

inline void to_json(nlohmann::json& j, const PackingSet& p) {
  j = {{"domain", p.domain}, {"scale", p.scale}, {"construction", "greedy"}, {"points", p.points}};
}

inline void from_json(const nlohmann::json& j, PackingSet& p) {
  p.domain = j.at("domain").get<Domain>();
  p.scale = j.at("scale").get<double>();
  p.points = j.at("points").get<std::vector<Point>>();
}

inline void to_json(nlohmann::json& j, const DualityReport& r) {
  j = {{"domain", r.domain},
       {"scale", r.scale},
       {"packing_2gamma", r.packing_2gamma},
       {"cover_gamma", r.cover_gamma},
       {"packing_gamma", r.packing_gamma},
       {"pass", r.pass}};
}

}  // namespace relaxed
