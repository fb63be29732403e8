#include <cmath>

#include "doctest.h"
#include "qeflat/adapted.hpp"
#include "qeflat/warp.hpp"

using namespace qeflat;

namespace {

Fixture fixture(const char* name) {
  auto fx = catalog(name);
  REQUIRE(fx.potential);
  return fx;
}

}  // namespace

TEST_CASE("level-set frame") {
  const auto gs = fixture("gaussian_soliton:3");
  const Point x{2.0, 0.0, 0.0};
  const auto fr = frame(gs.metric, *gs.potential, x);
  CHECK(fr.grad_norm2 == doctest::Approx(1.0));
  CHECK(fr.normal(0) == doctest::Approx(1.0));
  CHECK(std::abs(fr.normal(1)) < 1e-15);
  CHECK(fr.projector(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(fr.projector(0, 0)) < 1e-15);
  for (const auto& [name, value] : frame_defects(fr)) {
    CAPTURE(name);
    CHECK(value < 1e-12);
  }
  // At (2, 0, 0) df = dx and g is Euclidean, so the chart is adapted there; elsewhere not.
  CHECK(fr.is_adapted_chart);
  CHECK_FALSE(frame(gs.metric, *gs.potential, Point{1.2, -1.6, 0.0}).is_adapted_chart);

  const auto hq = fixture("hyperbolic_qe:3:1");
  const Point p{0.3, -0.4, 0.8};
  const auto fh = frame(hq.metric, *hq.potential, p);
  CHECK(fh.grad_norm2 == doctest::Approx(1.0));
  CHECK(fh.normal(0) == doctest::Approx(-1.0));
  CHECK(fh.projector(1, 1) == doctest::Approx(std::exp(0.6)));
  CHECK(std::abs(fh.projector(0, 0)) < 1e-15);

  const auto ah = fixture("adapted_hyperbolic_qe:3:1");
  CHECK(frame(ah.metric, *ah.potential, Point{0.2, 0.1, -0.1}).is_adapted_chart);
}

TEST_CASE("critical points are rejected") {
  const auto s3 = fixture("sphere:3");
  CHECK_THROWS_AS(frame(s3.metric, *s3.potential, Point{1.0, 1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(second_fundamental_form(s3.metric, *s3.potential, Point{1.0, 1.0, 1.0}),
                  PreconditionError);
  CHECK_THROWS_AS(mean_curvature(s3.metric, *s3.potential, Point{1.0, 1.0, 1.0}), PreconditionError);
  const auto gs = fixture("gaussian_soliton:3");
  CHECK_THROWS_AS(frame(gs.metric, *gs.potential, Point{0.0, 0.0, 0.0}), PreconditionError);
}

TEST_CASE("second fundamental form and mean curvature, two paths each") {
  const auto hq = fixture("hyperbolic_qe:3:1");
  const Point t0{0.0, 0.4, -0.7};
  const auto h = second_fundamental_form(hq.metric, *hq.potential, t0);
  CHECK(h.via_hessian(1, 1) == doctest::Approx(1.0));
  CHECK(h.via_hessian(2, 2) == doctest::Approx(1.0));
  CHECK(std::abs(h.via_hessian(1, 2)) < 1e-12);
  CHECK(std::abs(h.via_hessian(0, 0)) < 1e-12);
  CHECK(h.two_path < 1e-8);
  const auto H = mean_curvature(hq.metric, *hq.potential, t0);
  CHECK(H.via_trace == doctest::Approx(2.0));
  CHECK(H.via_formula == doctest::Approx(2.0));
  CHECK(umbilicity_defect(hq.metric, *hq.potential, t0) < 1e-9);

  // Round spheres of radius 2 around the origin: h = -P/2 with the outward
  // normal grad f / |grad f|, so H = -(n-1)/2.
  for (int n : {3, 4}) {
    const auto gs = fixture(n == 3 ? "gaussian_soliton:3" : "gaussian_soliton:4");
    Point x(n, 0.0);
    x[0] = 1.2;
    x[1] = -1.6;
    const auto fr = frame(gs.metric, *gs.potential, x);
    const auto hs = second_fundamental_form(gs.metric, *gs.potential, x);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) CHECK(std::abs(hs.via_hessian(a, b) + fr.projector(a, b) / 2) < 1e-12);
    CHECK(hs.two_path < 1e-8);
    const auto Hs = mean_curvature(gs.metric, *gs.potential, x);
    CHECK(Hs.via_trace == doctest::Approx(-(n - 1) / 2.0));
    CHECK(Hs.two_path < 1e-8);
    CHECK(umbilicity_defect(gs.metric, *gs.potential, x) < 1e-9);
  }
}

TEST_CASE("fiber sectional curvature, Gauss equation vs closed form") {
  const auto hq = fixture("hyperbolic_qe:3:1");
  const double p[] = {0.5, 0.1, 0.2};
  const double x[] = {0.3, 1.0, 0.2};
  const double y[] = {-0.1, 0.4, 1.5};
  const auto kh = fiber_sectional_curvature(hq.metric, *hq.potential, p, x, y);
  CHECK(std::abs(kh.gauss) < 1e-9);
  CHECK(kh.two_path < 1e-8);

  const auto gs = fixture("gaussian_soliton:3");
  const double q[] = {0.0, 2.0, 0.0};
  const double u[] = {1.0, 0.3, 0.0};
  const double v[] = {0.2, 0.0, 1.0};
  const auto ks = fiber_sectional_curvature(gs.metric, *gs.potential, q, u, v);
  CHECK(ks.gauss == doctest::Approx(0.25));
  CHECK(ks.closed_form == doctest::Approx(0.25));
  CHECK(ks.two_path < 1e-8);

  const double w[] = {0.0, 1.0, 0.0};  // purely normal: no tangential part
  CHECK_THROWS_AS(fiber_sectional_curvature(gs.metric, *gs.potential, q, w, v), PreconditionError);
}

TEST_CASE("constancy along level sets") {
  const auto hq = fixture("hyperbolic_qe:3:1");
  auto pts = hq.level_sampler(-0.7, 10, 5);
  CHECK(check_level_set_constancy(hq.metric, *hq.potential, pts).passed());
  const auto gs = fixture("gaussian_soliton:3");
  CHECK(check_level_set_constancy(gs.metric, *gs.potential, gs.level_sampler(1.5 * 1.5 / 4, 10, 6))
            .passed());

  pts.push_back(hq.level_sampler(0.2, 1, 9).front());
  CHECK_THROWS_AS(check_level_set_constancy(hq.metric, *hq.potential, pts), PreconditionError);
}

TEST_CASE("adapted-chart identities") {
  for (const char* name :
       {"adapted_hyperbolic_qe:3:1", "adapted_hyperbolic_qe:3:2", "adapted_hyperbolic_qe:3:-1",
        "adapted_hyperbolic_qe:4:1", "adapted_gaussian_soliton:3", "adapted_gaussian_soliton:4",
        "adapted_sphere_qe:3:1", "adapted_sphere_qe:4:0.5", "adapted_sphere_qe:3:-0.5"}) {
    CAPTURE(name);
    const auto fx = fixture(name);
    const auto chart = make_adapted_chart(fx.metric, *fx.potential);
    const auto pts = sample_points(fx.metric.domain(), 10, 3);
    const auto ids = check_adapted_identities(chart, pts);
    CHECK(ids.passed());
    for (const char* key : {"id1", "id1_radial", "id2", "id2_radial", "id3", "id3_tangential"}) {
      CAPTURE(key);
      CHECK(ids.tolerances.count(key) == 1);
      CHECK(ids.value(key) < 1e-8);
    }
    const auto cc = cotton_component_checks(chart, pts);
    CHECK(cc.passed());
    CHECK(cc.value("cotton_0j0") < 1e-8);
    CHECK(cc.value("cotton_ij0") < 1e-7);
  }
}

TEST_CASE("adapted identities: vanishing coefficients are exact") {
  // mu = 1: grad_j R has no right-hand side.
  const auto one = fixture("adapted_hyperbolic_qe:3:1");
  for (const auto& p : sample_points(one.metric.domain(), 5, 1)) {
    const auto geo = point_geometry(one.metric, one.potential->f, p);
    for (int j = 1; j < 3; ++j) CHECK(std::abs(geo.curvature.scalar_gradient(j)) < 1e-12);
  }
  // mu = 1/(2-n): both Cotton displays vanish whatever h is.
  const auto special = fixture("adapted_hyperbolic_qe:3:-1");
  const auto geo = point_geometry(special.metric, special.potential->f, Point{0.1, 0.2, 0.3});
  const auto d = cotton_displays(geo, *special.potential);
  CHECK(max_abs(d.c0j0_rhs) == 0.0);
  CHECK(max_abs(d.cij0_rhs) == 0.0);
  CHECK(max_abs(d.c0j0_lhs) < 1e-12);
  CHECK(max_abs(d.cij0_lhs) < 1e-12);
}

TEST_CASE("adapted-chart preconditions") {
  const auto s3 = fixture("sphere:3");
  CHECK_THROWS_AS(make_adapted_chart(s3.metric, *s3.potential), PreconditionError);
  const auto tilted = MetricSpec::from_text("tilted", {"u", "x", "y"},
                                            std::vector<Interval>(3, Interval{-1, 1}),
                                            {{{0, 0}, "1"}, {{0, 1}, "0.1"}, {{1, 1}, "1"}, {{2, 2}, "1"}});
  const PotentialSpec pu{parse("u", {"u", "x", "y"}), 0.0, 0.0};
  CHECK_THROWS_AS(make_adapted_chart(tilted, pu), PreconditionError);
}

TEST_CASE("warped-product verdict") {
  for (const char* name : {"hyperbolic_qe:3:1", "hyperbolic_qe:3:2", "hyperbolic_qe:4:1",
                           "hyperbolic_qe:3:-0.5", "gaussian_soliton:3", "gaussian_soliton:4",
                           "sphere_qe:3:1", "sphere_qe:4:0.5", "adapted_gaussian_soliton:3"}) {
    CAPTURE(name);
    const auto fx = fixture(name);
    const auto plan = make_sample_plan(fx.level_sampler, fx.default_levels, 10, 3, 0);
    REQUIRE(plan.levels.size() >= 3);
    const auto r = theorem_verdict(fx.metric, *fx.potential, plan);
    CHECK(r.passed());
    for (const char* key : {"tangential_ricci", "tangential_grad_scalar", "tangential_grad_norm2",
                            "umbilicity", "spread(fiber_curvature)"}) {
      CAPTURE(key);
      CHECK(r.value(key) < 1e-7);
    }
    for (const char* key : {"h_two_path", "H_two_path", "fiber_two_path"}) {
      CAPTURE(key);
      CHECK(r.value(key) < 1e-8);
    }
  }

  const auto s2s2 = fixture("s2xs2");
  const auto bad = theorem_verdict(
      s2s2.metric, PotentialSpec{parse("a1", s2s2.metric.coordinates()), 0.0, 1.0},
      SamplePlan{{LevelSample{1.0, {{1.0, 0.3, 1.2, 0.8}}}}, 3, 0});
  CHECK(bad.verdict == Verdict::NotApplicable);

  const auto sm = fixture("special_mu:3");
  CHECK_THROWS_AS(theorem_verdict(sm.metric, *sm.potential,
                                  make_sample_plan(sm.level_sampler, sm.default_levels, 3, 1, 0)),
                  PreconditionError);
}
