#include "qeflat/warp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "qeflat/errors.hpp"
#include "qeflat/quasi_einstein.hpp"

namespace qeflat {

namespace {

constexpr double kPoleMargin = 0.2;
constexpr int kSelfCheckPoints = 20;
constexpr double kSelfCheckTolerance = 1e-8;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return x < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

std::vector<std::string> names(const std::string& head, const std::string& stem, int count) {
  std::vector<std::string> out;
  if (!head.empty()) out.push_back(head);
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

// Fiber line elements for the constant-curvature charts, as text in w1..wm.
std::vector<std::string> fiber_components(int k, int m) {
  std::vector<std::string> out(m, "1");
  for (int i = 1; i < m; ++i) {
    if (k == 1) {
      std::string s;
      for (int j = 1; j <= i; ++j) s += (j > 1 ? "*" : "") + std::string("sin(w") + std::to_string(j) + ")^2";
      out[i] = s;
    } else if (k == -1) {
      out[i] = "exp(2*w1)";
    }
  }
  return out;
}

std::vector<Interval> fiber_domain(int k, int m) {
  const Interval box = k == 1 ? Interval{kPoleMargin, std::numbers::pi - kPoleMargin}
                              : Interval{-1.0, 1.0};
  return std::vector<Interval>(m, box);
}

std::string args_or(const std::vector<std::string>& args, std::size_t i, const char* fallback) {
  return i < args.size() ? args[i] : fallback;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("invalid " + what + " '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw std::invalid_argument("invalid " + what + " '" + s + "'");
  }
  return v;
}

int parse_dimension(const std::string& s, int lo) {
  const int n = parse_int(s, "dimension");
  if (n < lo || n > kMaxJetDimension) {
    throw std::invalid_argument("dimension must be in [" + std::to_string(lo) + ", " +
                                std::to_string(kMaxJetDimension) + "], got " + s);
  }
  return n;
}

PotentialSpec potential(const MetricSpec& m, const std::string& f, double mu, double lambda) {
  return {parse(f, m.coordinates()), mu, lambda};
}

// Uniform points of the box with coordinate 0 pinned to `level`.
LevelSampler pinned_first(std::vector<Interval> box, std::function<double(double)> to_coord) {
  return [box = std::move(box), to_coord = std::move(to_coord)](double level, int count,
                                                                std::uint64_t seed) {
    auto pts = sample_points(box, count, seed);
    const double x0 = to_coord(level);
    for (auto& p : pts) p[0] = x0;
    return pts;
  };
}

LevelSampler whole_domain(std::vector<Interval> box) {
  return [box = std::move(box)](double, int count, std::uint64_t seed) {
    return sample_points(box, count, seed);
  };
}

// Round spheres |x| = 2 sqrt(level) about the origin, directions by rejection.
LevelSampler origin_spheres(int n) {
  return [n](double level, int count, std::uint64_t seed) {
    if (!(level > 0.0)) throw PreconditionError("level sets of |x|^2/4 need a positive level");
    const double r = 2.0 * std::sqrt(level);
    SplitMix64 rng(seed);
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < count) {
      Point u(n);
      double s = 0.0;
      for (double& x : u) {
        x = rng.uniform(-1.0, 1.0);
        s += x * x;
      }
      if (s < 0.01 || s > 1.0) continue;
      const double scale = r / std::sqrt(s);
      for (double& x : u) x *= scale;
      pts.push_back(std::move(u));
    }
    return pts;
  };
}

void self_check(const Fixture& fx) {
  if (!fx.potential) return;
  for (const auto& p : sample_points(fx.metric.domain(), kSelfCheckPoints, 0)) {
    const double r = qe_residual_defect(point_geometry(fx.metric, fx.potential->f, p), *fx.potential);
    if (!(r < kSelfCheckTolerance)) {
      std::ostringstream msg;
      msg << "catalog fixture '" << fx.name << "' fails its quasi-Einstein self-check (" << r
          << ")";
      throw std::logic_error(msg.str());
    }
  }
}

Fixture space_form(const std::string& name, int n, const std::string& phi, int k, Interval t,
                   double lambda, const std::string& description) {
  WarpSpec spec{n, phi, k, t, name};
  Fixture fx;
  fx.name = name;
  fx.description = description;
  fx.metric = build_warped_chart(spec);
  fx.potential = potential(fx.metric, "0", 0.0, lambda);
  fx.default_levels = {0.0};
  fx.level_sampler = whole_domain(fx.metric.domain());
  return fx;
}

// dt^2 + exp(2t) delta with f = a t, a = -1/mu, lambda = a - (n - 1).
Fixture hyperbolic_family(const std::string& name, int n, double mu, const std::string& what) {
  const double a = -1.0 / mu;
  const double lambda = a - (n - 1);
  Fixture fx;
  fx.name = name;
  fx.description = what;
  std::map<std::pair<int, int>, std::string> comps{{{0, 0}, "1"}};
  for (int i = 1; i < n; ++i) comps[{i, i}] = "exp(2*t)";
  fx.metric = MetricSpec::from_text(name, names("t", "x", n - 1),
                                    std::vector<Interval>(n, Interval{-1.0, 1.0}), comps);
  fx.potential = potential(fx.metric, num(a) + "*t", mu, lambda);
  for (double t : {-0.5, 0.0, 0.5}) fx.default_levels.push_back(a * t);
  fx.level_sampler = pinned_first(fx.metric.domain(), [a](double level) { return level / a; });
  return fx;
}

Fixture lookup(const std::string& base, const std::vector<std::string>& args,
               const std::string& spec) {
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw std::invalid_argument("wrong number of arguments for catalog fixture '" + spec + "'");
    }
  };
  auto dim = [&](std::size_t i, int fallback, int lo) {
    return i < args.size() ? parse_dimension(args[i], lo) : fallback;
  };

  if (base == "flat") {
    arity(0, 1);
    const int n = dim(0, 3, 2);
    Fixture fx;
    fx.name = "flat:" + std::to_string(n);
    fx.description = "Euclidean space, f = 0, lambda = 0";
    std::map<std::pair<int, int>, std::string> comps;
    for (int i = 0; i < n; ++i) comps[{i, i}] = "1";
    fx.metric = MetricSpec::from_text(fx.name, names("", "x", n),
                                      std::vector<Interval>(n, Interval{-1.0, 1.0}), comps);
    fx.potential = potential(fx.metric, "0", 0.0, 0.0);
    fx.default_levels = {0.0};
    fx.level_sampler = whole_domain(fx.metric.domain());
    return fx;
  }
  if (base == "sphere") {
    arity(0, 2);
    const int n = dim(0, 3, 2);
    const double r = args.size() > 1 ? parse_double(args[1], "radius") : 1.0;
    if (!(r > 0.0)) throw std::invalid_argument("sphere radius must be positive");
    const std::string name = "sphere:" + std::to_string(n) + ":" + args_or(args, 1, "1");
    return space_form(name, n, num(r) + "*sin(t/" + num(r) + ")", 1,
                      {kPoleMargin * r, (std::numbers::pi - kPoleMargin) * r},
                      (n - 1) / (r * r), "round sphere of radius r in polar coordinates");
  }
  if (base == "hyperbolic") {
    arity(0, 1);
    const int n = dim(0, 3, 2);
    return space_form("hyperbolic:" + std::to_string(n), n, "exp(t)", 0, {-1.0, 1.0},
                      -(n - 1.0), "hyperbolic space dt^2 + exp(2t) delta");
  }
  if (base == "gaussian_soliton") {
    arity(0, 1);
    const int n = dim(0, 3, 2);
    Fixture fx;
    fx.name = "gaussian_soliton:" + std::to_string(n);
    fx.description = "flat space, f = |x|^2/4, mu = 0, lambda = 1/2";
    std::map<std::pair<int, int>, std::string> comps;
    std::string f;
    for (int i = 0; i < n; ++i) {
      comps[{i, i}] = "1";
      f += (i ? "+" : "") + std::string("x") + std::to_string(i + 1) + "^2";
    }
    fx.metric = MetricSpec::from_text(fx.name, names("", "x", n),
                                      std::vector<Interval>(n, Interval{-2.0, 2.0}), comps);
    fx.potential = potential(fx.metric, "(" + f + ")/4", 0.0, 0.5);
    for (double r : {1.0, 1.5, 2.0}) fx.default_levels.push_back(r * r / 4.0);
    fx.level_sampler = origin_spheres(n);
    return fx;
  }
  if (base == "hyperbolic_qe") {
    arity(0, 2);
    const int n = dim(0, 3, 3);
    const double mu = args.size() > 1 ? parse_double(args[1], "mu") : 1.0;
    if (mu == 0.0) {
      throw std::invalid_argument("hyperbolic_qe needs mu != 0; use gaussian_soliton for mu = 0");
    }
    return hyperbolic_family("hyperbolic_qe:" + std::to_string(n) + ":" + args_or(args, 1, "1"), n,
                             mu, "dt^2 + exp(2t) delta, f = -t/mu, lambda = -1/mu - (n-1)");
  }
  if (base == "special_mu") {
    arity(0, 1);
    const int n = dim(0, 3, 3);
    return hyperbolic_family("special_mu:" + std::to_string(n), n, 1.0 / (2.0 - n),
                             "dt^2 + exp(2t) delta, mu = 1/(2-n), f = (n-2) t, lambda = -1");
  }
  if (base == "sphere_qe") {
    arity(0, 2);
    const int n = dim(0, 3, 3);
    const double mu = args.size() > 1 ? parse_double(args[1], "mu") : 1.0;
    if (mu == 0.0) throw std::invalid_argument("sphere_qe needs mu != 0");
    const double m = 1.0 / mu;
    Fixture fx = space_form("sphere_qe:" + std::to_string(n) + ":" + args_or(args, 1, "1"), n,
                            "sin(t)", 1, {0.2, 1.3}, n - 1 + m,
                            "unit hemisphere, f = -log(cos t)/mu, lambda = n - 1 + 1/mu");
    fx.potential = potential(fx.metric, num(-m) + "*log(cos(t))", mu, n - 1 + m);
    fx.default_levels.clear();
    for (double r : {0.5, 0.8, 1.1}) fx.default_levels.push_back(-m * std::log(std::cos(r)));
    fx.level_sampler = pinned_first(fx.metric.domain(), [mu](double level) {
      return std::acos(std::exp(-mu * level));
    });
    return fx;
  }
  if (base == "adapted_sphere_qe") {
    arity(0, 2);
    const int n = dim(0, 3, 3);
    const double mu = args.size() > 1 ? parse_double(args[1], "mu") : 1.0;
    if (mu == 0.0) throw std::invalid_argument("adapted_sphere_qe needs mu != 0");
    const double m = 1.0 / mu;
    Fixture fx;
    fx.name = "adapted_sphere_qe:" + std::to_string(n) + ":" + args_or(args, 1, "1");
    fx.description = "sphere_qe with u = f as first coordinate";
    fx.adapted = true;
    // cos r = exp(-mu u): |grad f|^2 = m^2 (exp(2 mu u) - 1), sin(r)^2 = 1 - exp(-2 mu u).
    const std::string e2 = "exp(" + num(2.0 * mu) + "*u)";
    std::map<std::pair<int, int>, std::string> comps{
        {{0, 0}, num(mu * mu) + "/(" + e2 + "-1)"}};
    const auto sphere = fiber_components(1, n - 1);
    const std::string radial = "(1-exp(" + num(-2.0 * mu) + "*u))";
    for (int i = 1; i < n; ++i) {
      comps[{i, i}] = sphere[i - 1] == "1" ? radial : radial + "*" + sphere[i - 1];
    }
    auto level_of = [m](double r) { return -m * std::log(std::cos(r)); };
    std::vector<Interval> box{{std::min(level_of(0.5), level_of(1.2)),
                               std::max(level_of(0.5), level_of(1.2))}};
    for (const auto& iv : fiber_domain(1, n - 1)) box.push_back(iv);
    fx.metric = MetricSpec::from_text(fx.name, names("u", "w", n - 1), box, comps);
    fx.potential = potential(fx.metric, "u", mu, n - 1 + m);
    for (double r : {0.6, 0.8, 1.0}) fx.default_levels.push_back(level_of(r));
    fx.level_sampler = adapted_level_sampler(fx.metric);
    return fx;
  }
  if (base == "adapted_hyperbolic_qe") {
    arity(0, 2);
    const int n = dim(0, 3, 3);
    const double mu = args.size() > 1 ? parse_double(args[1], "mu") : 1.0;
    if (mu == 0.0) throw std::invalid_argument("adapted_hyperbolic_qe needs mu != 0");
    const double a = -1.0 / mu;
    Fixture fx;
    fx.name = "adapted_hyperbolic_qe:" + std::to_string(n) + ":" + args_or(args, 1, "1");
    fx.description = "hyperbolic_qe with u = f as first coordinate";
    fx.adapted = true;
    std::map<std::pair<int, int>, std::string> comps{{{0, 0}, num(1.0 / (a * a))}};
    for (int i = 1; i < n; ++i) comps[{i, i}] = "exp(" + num(2.0 / a) + "*u)";
    fx.metric = MetricSpec::from_text(fx.name, names("u", "x", n - 1),
                                      std::vector<Interval>(n, Interval{-1.0, 1.0}), comps);
    fx.potential = potential(fx.metric, "u", mu, a - (n - 1));
    fx.default_levels = {-0.5, 0.0, 0.5};
    fx.level_sampler = adapted_level_sampler(fx.metric);
    return fx;
  }
  if (base == "adapted_gaussian_soliton") {
    arity(0, 1);
    const int n = dim(0, 3, 3);
    Fixture fx;
    fx.name = "adapted_gaussian_soliton:" + std::to_string(n);
    fx.description = "flat space with u = |x|^2/4 and polar angles";
    fx.adapted = true;
    std::map<std::pair<int, int>, std::string> comps{{{0, 0}, "1/u"}};
    const auto sphere = fiber_components(1, n - 1);
    for (int i = 1; i < n; ++i) comps[{i, i}] = "4*u*" + sphere[i - 1];
    std::vector<Interval> box{{0.5, 2.0}};
    for (const auto& iv : fiber_domain(1, n - 1)) box.push_back(iv);
    fx.metric = MetricSpec::from_text(fx.name, names("u", "w", n - 1), box, comps);
    fx.potential = potential(fx.metric, "u", 0.0, 0.5);
    fx.default_levels = {0.75, 1.0, 1.5};
    fx.level_sampler = adapted_level_sampler(fx.metric);
    return fx;
  }
  if (base == "s2xs2") {
    arity(0, 0);
    Fixture fx;
    fx.name = "s2xs2";
    fx.description = "product of two unit 2-spheres, Einstein with Ric = g, not conformally flat";
    const Interval polar{kPoleMargin, std::numbers::pi - kPoleMargin};
    fx.metric = MetricSpec::from_text(
        fx.name, {"a1", "a2", "b1", "b2"}, {polar, {-1.0, 1.0}, polar, {-1.0, 1.0}},
        {{{0, 0}, "1"}, {{1, 1}, "sin(a1)^2"}, {{2, 2}, "1"}, {{3, 3}, "sin(b1)^2"}});
    fx.potential = potential(fx.metric, "0", 0.0, 1.0);
    fx.default_levels = {0.0};
    fx.level_sampler = whole_domain(fx.metric.domain());
    return fx;
  }
  throw std::invalid_argument("unknown catalog fixture '" + spec + "'");
}

}  // namespace

MetricSpec build_warped_chart(const WarpSpec& spec) {
  const int n = spec.n;
  if (n < 2 || n > kMaxJetDimension) {
    throw std::invalid_argument("warped product dimension must be in [2, " +
                                std::to_string(kMaxJetDimension) + "]");
  }
  if (spec.k < -1 || spec.k > 1) throw std::invalid_argument("fiber curvature k must be -1, 0 or 1");
  if (!(spec.t_domain.lo < spec.t_domain.hi)) throw std::invalid_argument("empty t domain");

  const Expression phi = parse(spec.phi, {"t"});
  for (int i = 0; i <= 64; ++i) {
    const double t = spec.t_domain.lo + (spec.t_domain.hi - spec.t_domain.lo) * i / 64.0;
    const double v = evaluate(phi, std::span<const double>(&t, 1));
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "warping function must be positive: phi(" << t << ") = " << v;
      throw PreconditionError(msg.str());
    }
  }

  const int m = n - 1;
  const auto fiber = fiber_components(spec.k, m);
  std::map<std::pair<int, int>, std::string> comps{{{0, 0}, "1"}};
  const std::string phi2 = "(" + phi.to_string() + ")^2";
  for (int i = 0; i < m; ++i) {
    comps[{i + 1, i + 1}] = fiber[i] == "1" ? phi2 : phi2 + "*" + fiber[i];
  }
  std::vector<Interval> box{spec.t_domain};
  for (const auto& iv : fiber_domain(spec.k, m)) box.push_back(iv);
  std::string name = spec.name;
  if (name.empty()) {
    name = "warp(n=" + std::to_string(n) + ", k=" + std::to_string(spec.k) + ", phi=" + spec.phi + ")";
  }
  return MetricSpec::from_text(name, names("t", "w", m), box, comps);
}

CheckReport check_lcf(const MetricSpec& chart, const std::vector<Point>& points,
                      double tol_multiplier) {
  const int n = chart.dimension();
  if (n < 3) throw PreconditionError("conformal flatness checks need n >= 3");
  CheckReport report("lcf");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  for (const auto& p : points) report.add_point(p, lcf_defects(curvature_pack(chart, p)));
  report.require(n == 3 ? "cotton_defect" : "weyl_defect", kWarpedLcfTolerance * tol_multiplier);
  report.finalize();
  return report;
}

CheckReport check_warped_lcf(const WarpSpec& spec, const std::vector<Point>& points,
                             double tol_multiplier) {
  auto report = check_lcf(build_warped_chart(spec), points, tol_multiplier);
  report.check = "warped_lcf";
  return report;
}

LevelSampler adapted_level_sampler(const MetricSpec& chart) {
  return pinned_first(chart.domain(), [](double level) { return level; });
}

SamplePlan make_sample_plan(const LevelSampler& sampler, const std::vector<double>& levels,
                            int points_per_level, int planes_per_point, std::uint64_t seed) {
  if (!sampler) throw PreconditionError("no level-set sampler for this source");
  SamplePlan plan;
  plan.seed = seed;
  plan.planes_per_point = planes_per_point;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    plan.levels.push_back({levels[i], sampler(levels[i], points_per_level, seed + i)});
  }
  return plan;
}

Fixture catalog(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : spec) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  const std::string base = parts.front();
  std::vector<std::string> args(parts.begin() + 1, parts.end());
  Fixture fx = lookup(base, args, spec);
  self_check(fx);
  return fx;
}

std::vector<CatalogEntry> catalog_names() {
  return {
      {"flat[:n]", "Euclidean space; f = 0"},
      {"sphere[:n[:r]]", "round sphere of radius r (polar chart); f = 0"},
      {"hyperbolic[:n]", "hyperbolic space dt^2 + exp(2t) delta; f = 0"},
      {"gaussian_soliton[:n]", "flat space, f = |x|^2/4, mu = 0, lambda = 1/2"},
      {"hyperbolic_qe[:n[:mu]]", "dt^2 + exp(2t) delta, f = -t/mu, lambda = -1/mu - (n-1)"},
      {"special_mu[:n]", "hyperbolic_qe with mu = 1/(2-n)"},
      {"sphere_qe[:n[:mu]]", "unit hemisphere, f = -log(cos t)/mu, lambda = n - 1 + 1/mu"},
      {"adapted_sphere_qe[:n[:mu]]", "sphere_qe with f as first coordinate"},
      {"adapted_hyperbolic_qe[:n[:mu]]", "hyperbolic_qe with f as first coordinate"},
      {"adapted_gaussian_soliton[:n]", "gaussian_soliton with f as first coordinate"},
      {"s2xs2", "S^2 x S^2, Einstein but not conformally flat"},
  };
}

}  // namespace qeflat
