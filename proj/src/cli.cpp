#include "qeflat/cli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qeflat/adapted.hpp"
#include "qeflat/conformal.hpp"
#include "qeflat/curvature.hpp"
#include "qeflat/errors.hpp"
#include "qeflat/warp.hpp"

namespace qeflat {

namespace {

// Thrown for problems with the user's input that surface after option parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::string catalog;
  int points = 10;
  std::uint64_t seed = 0;
  double tol = 1.0;
  bool json = false;
  std::vector<double> levels;
  int planes = 3;

  // warp-build
  std::string phi;
  int k = 0;
  int dim = 3;
  std::vector<double> t_range{-1.0, 1.0};
  bool verify = false;
};

struct Source {
  std::string name;
  MetricSpec metric;
  std::optional<PotentialSpec> potential;
  bool adapted = false;
  std::vector<double> default_levels;
  LevelSampler sampler;
};

Source load_source(const Options& o) {
  if (o.file.empty() == o.catalog.empty()) {
    throw UsageError("exactly one of --file or --catalog is required");
  }
  Source s;
  if (!o.catalog.empty()) {
    Fixture fx = catalog(o.catalog);
    s.name = fx.name;
    s.metric = std::move(fx.metric);
    s.potential = std::move(fx.potential);
    s.adapted = fx.adapted;
    s.default_levels = std::move(fx.default_levels);
    s.sampler = std::move(fx.level_sampler);
  } else {
    MetricFile mf = load_metric_file(o.file);
    s.name = o.file;
    s.metric = std::move(mf.metric);
    s.potential = std::move(mf.potential);
    s.adapted = mf.adapted;
  }
  if (s.adapted) {
    make_adapted_chart(s.metric, *s.potential, o.seed);
    if (!s.sampler) s.sampler = adapted_level_sampler(s.metric);
  }
  return s;
}

const PotentialSpec& need_potential(const Source& s) {
  if (!s.potential) throw PreconditionError("'" + s.name + "' has no potential (f, mu, lambda)");
  return *s.potential;
}

std::vector<Point> points_of(const Source& s, const Options& o) {
  return sample_points(s.metric.domain(), o.points, o.seed);
}

SamplePlan plan_of(const Source& s, const Options& o) {
  const auto& levels = o.levels.empty() ? s.default_levels : o.levels;
  if (!s.sampler) {
    throw PreconditionError(
        "level sets can only be sampled for catalog fixtures and adapted metric files");
  }
  if (levels.empty()) throw UsageError("no level values: pass --level v1,v2,...");
  return make_sample_plan(s.sampler, levels, o.points, o.planes, o.seed);
}

void stamp(CheckReport& r, const Source& s, const Options& o) {
  r.source = s.name;
  r.seed = o.seed;
  r.tol_multiplier = o.tol;
}

CheckReport curvature_report(const Source& s, const Options& o) {
  CheckReport r("curvature");
  const int n = s.metric.dimension();
  for (const auto& p : points_of(s, o)) {
    const auto jets = curvature_jets(s.metric, p);
    const auto pack = curvature_pack(jets, p);
    Defects d = curvature_identity_defects(pack);
    const auto norms = curvature_norms(pack);
    d.insert(d.end(), norms.begin(), norms.end());
    if (n >= 4) d.emplace_back("weyl_divergence", weyl_divergence_defect(jets));
    r.add_point(p, d);
  }
  for (const char* key : {"christoffel_symmetry", "riemann_symmetry", "first_bianchi",
                          "ricci_symmetry", "weyl_trace"}) {
    if (r.aggregate.count(key)) r.require(key, 1e-9 * o.tol);
  }
  for (const char* key : {"schur", "cotton_antisymmetry", "cotton_trace", "weyl_divergence"}) {
    if (r.aggregate.count(key)) r.require(key, 1e-6 * o.tol);
  }
  return r;
}

CheckReport identities_report(const Source& s, const Options& o) {
  const auto& pot = need_potential(s);
  const auto pts = points_of(s, o);
  CheckReport r = check_qe_identities(s.metric, pot, pts, o.tol);
  if (s.adapted) {
    const AdaptedChartSpec chart{s.metric, pot};
    r.absorb(check_adapted_identities(chart, pts, o.tol));
    r.absorb(cotton_component_checks(chart, pts, o.tol));
  }
  return r;
}

CheckReport levelsets_report(const Source& s, const Options& o) {
  const auto& pot = need_potential(s);
  CheckReport r("levelsets");
  for (const auto& level : plan_of(s, o).levels) {
    r.absorb(check_level_set_constancy(s.metric, pot, level.points, o.tol));
  }
  return r;
}

CheckReport conformal_report(const Source& s, const Options& o) {
  const auto& pot = need_potential(s);
  const auto pts = points_of(s, o);
  CheckReport r = check_conformal_ricci_formula(s.metric, pot.f, pts, o.tol);
  r.check = "conformal";
  if (pot.is_special_mu(s.metric.dimension())) {
    r.absorb(check_special_mu(s.metric, pot, pts, o.tol));
  } else {
    r.absorb(check_two_eigenvalue_structure(s.metric, pot, pts, o.tol));
  }
  return r;
}

int emit(CheckReport r, const Source& s, const Options& o, std::ostream& out) {
  stamp(r, s, o);
  r.finalize();
  out << report_render(r, o.json);
  switch (r.verdict) {
    case Verdict::Pass: return kExitPass;
    case Verdict::Fail: return kExitFail;
    case Verdict::NotApplicable: return kExitPrecondition;
  }
  return kExitFail;
}

int warp_build(const Options& o, std::ostream& out) {
  if (o.phi.empty()) throw UsageError("warp-build needs --phi");
  if (o.t_range.size() != 2) throw UsageError("--t-range takes two values: lo,hi");
  WarpSpec spec{o.dim, o.phi, o.k, {o.t_range[0], o.t_range[1]}, ""};
  MetricFile mf{build_warped_chart(spec), std::nullopt, false};
  if (!o.verify) {
    out << write_metric_file(mf);
    return kExitPass;
  }
  Source s;
  s.name = mf.metric.name();
  s.metric = mf.metric;
  CheckReport r = check_warped_lcf(spec, points_of(s, o), o.tol);
  return emit(std::move(r), s, o, out);
}

int catalog_list(const Options& o, std::ostream& out) {
  const auto entries = catalog_names();
  if (o.json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : entries) j.push_back({{"name", e.usage}, {"description", e.description}});
    out << j.dump(2) << "\n";
    return kExitPass;
  }
  std::size_t width = 0;
  for (const auto& e : entries) width = std::max(width, e.usage.size());
  for (const auto& e : entries) {
    out << e.usage << std::string(width + 2 - e.usage.size(), ' ') << e.description << "\n";
  }
  return kExitPass;
}

void add_source_options(CLI::App* sub, Options& o, bool levels) {
  sub->add_option("--file", o.file, "metric file")->check(CLI::ExistingFile);
  sub->add_option("--catalog", o.catalog, "catalog fixture, e.g. hyperbolic_qe:3:1");
  sub->add_option("--points", o.points, "sample points (per level set)")
      ->check(CLI::Range(1, 100000));
  sub->add_option("--seed", o.seed, "sampling seed");
  sub->add_option("--tol", o.tol, "tolerance multiplier")->check(CLI::PositiveNumber);
  sub->add_flag("--json", o.json, "print one JSON document");
  if (levels) {
    sub->add_option("--level", o.levels, "level values of f")->delimiter(',');
    sub->add_option("--planes", o.planes, "tangent planes per point")->check(CLI::Range(1, 1000));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature and quasi-Einstein checks for metrics given by component formulas",
               "qeflat"};
  app.require_subcommand(1);
  Options o;

  struct Command {
    const char* name;
    const char* help;
    bool levels;
  };
  const Command commands[] = {
      {"curvature", "curvature norms and universal identities", false},
      {"lcf", "local conformal flatness (Cotton for n = 3, Weyl for n >= 4)", false},
      {"qe", "quasi-Einstein residual and its three identities", false},
      {"identities", "identities under the quasi-Einstein gate (plus adapted-chart ones)", false},
      {"levelsets", "constancy of curvature data along level sets of f", true},
      {"theorem", "warped-product evidence over level sets of f", true},
      {"conformal", "conformal change exp(-2f/(n-2)) g and its Ricci tensor", false},
  };
  for (const auto& c : commands) add_source_options(app.add_subcommand(c.name, c.help), o, c.levels);

  auto* warp = app.add_subcommand("warp-build", "build dt^2 + phi(t)^2 g_k as a metric file");
  warp->add_option("--phi", o.phi, "warping function of t")->required();
  warp->add_option("--k", o.k, "fiber curvature")->check(CLI::IsMember({-1, 0, 1}));
  warp->add_option("--dim", o.dim, "total dimension")->check(CLI::Range(2, kMaxJetDimension));
  warp->add_option("--t-range", o.t_range, "t interval lo,hi")->delimiter(',')->expected(2);
  warp->add_flag("--verify", o.verify, "check conformal flatness instead of printing the file");
  warp->add_option("--points", o.points, "sample points for --verify")->check(CLI::Range(1, 100000));
  warp->add_option("--seed", o.seed, "sampling seed");
  warp->add_option("--tol", o.tol, "tolerance multiplier")->check(CLI::PositiveNumber);
  warp->add_flag("--json", o.json, "print one JSON document");

  auto* list = app.add_subcommand("catalog-list", "list catalog fixtures");
  list->add_flag("--json", o.json, "print one JSON document");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "qeflat: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "warp-build") return warp_build(o, out);
    if (name == "catalog-list") return catalog_list(o, out);

    const Source s = load_source(o);
    if (name == "curvature") return emit(curvature_report(s, o), s, o, out);
    if (name == "lcf") return emit(check_lcf(s.metric, points_of(s, o), o.tol), s, o, out);
    if (name == "qe") {
      return emit(check_quasi_einstein(s.metric, need_potential(s), points_of(s, o), o.tol), s, o,
                  out);
    }
    if (name == "identities") return emit(identities_report(s, o), s, o, out);
    if (name == "levelsets") return emit(levelsets_report(s, o), s, o, out);
    if (name == "theorem") {
      const auto& pot = need_potential(s);
      return emit(theorem_verdict(s.metric, pot, plan_of(s, o), o.tol), s, o, out);
    }
    if (name == "conformal") return emit(conformal_report(s, o), s, o, out);
    err << "qeflat: unknown subcommand '" << name << "'\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "qeflat: " << e.what() << "\n\n" << sub->help();
    return kExitUsage;
  } catch (const MetricFileError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "qeflat: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "qeflat: precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const DomainError& e) {
    err << "qeflat: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    err << "qeflat: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qeflat: internal error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace qeflat
