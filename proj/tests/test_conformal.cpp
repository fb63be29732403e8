#include <cmath>

#include "doctest.h"
#include "qeflat/conformal.hpp"
#include "qeflat/warp.hpp"
#include "support.hpp"

using namespace qeflat;
using qeflat::testing::random_metric;

TEST_CASE("f = 0 leaves the metric unchanged") {
  const auto chart = random_metric(3, 4);
  const auto same = conformal_metric(chart, parse("0", chart.coordinates()));
  const double p[] = {0.1, 0.2, -0.3};
  CHECK(max_abs_difference(same.metric_values(p), chart.metric_values(p)) == 0.0);
}

TEST_CASE("the special conformal change flattens the n = 3 exponential metric") {
  // g = dt^2 + e^{2t}(dx^2 + dy^2), f = t: g~ = e^{-2t} dt^2 + dx^2 + dy^2.
  const auto fx = catalog("special_mu:3");
  REQUIRE(fx.potential);
  CHECK(fx.potential->mu == -1.0);
  CHECK(fx.potential->lambda == -1.0);
  const auto gt = conformal_metric(fx.metric, fx.potential->f);
  for (const auto& p : sample_points(gt.domain(), 5, 3)) {
    const auto pack = curvature_pack(gt, p);
    CHECK(max_abs(pack.riemann) < 1e-9);
    CHECK(pack.metric.g(0, 0) == doctest::Approx(std::exp(-2 * p[0])));
    CHECK(pack.metric.g(1, 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("constant conformal factor rescales the scalar curvature") {
  for (int n : {3, 4}) {
    const auto chart = random_metric(n, 60 + n);
    const double c = 0.7;
    const auto gt = conformal_metric(chart, parse("0.7", chart.coordinates()));
    const Point p(n, 0.15);
    const double R = curvature_pack(chart, p).scalar;
    const double Rt = curvature_pack(gt, p).scalar;
    CHECK(Rt == doctest::Approx(std::exp(2 * c / (n - 2)) * R).epsilon(1e-10));
  }
}

TEST_CASE("conformal Ricci formula on random metrics and potentials") {
  for (int n : {3, 4, 5}) {
    for (int s = 0; s < 3; ++s) {
      const auto chart = random_metric(n, 300 + 10 * n + s);
      const auto& c = chart.coordinates();
      const Expression f = parse("0.4*sin(" + c[0] + " - 2*" + c[1] + ") + 0.3*" + c[n - 1] +
                                     "^2 + 0.2*exp(" + c[1] + ")",
                                 c);
      const auto r = check_conformal_ricci_formula(chart, f, sample_points(chart.domain(), 10, s));
      CAPTURE(n);
      CHECK(r.passed());
      CHECK(r.value("conformal_ricci") < 1e-6);
    }
  }
  const auto chart = random_metric(3, 1);
  const auto geo = point_geometry(chart, parse("0", chart.coordinates()), Point{0.1, 0.1, 0.1});
  CHECK(max_abs_difference(conformal_ricci_assembly(geo), geo.curvature.ricci) < 1e-15);
}

TEST_CASE("conformal flatness is conformally invariant") {
  const std::vector<std::string> c{"x", "y", "z", "w"};
  const auto flat = MetricSpec::from_text("flat4", c, std::vector<Interval>(4, Interval{-0.6, 0.6}),
                                          {{{0, 0}, "1"}, {{1, 1}, "1"}, {{2, 2}, "1"}, {{3, 3}, "1"}});
  const auto gt = conformal_metric(flat, parse("0.3*x + y^2 - sin(z*w)", c));
  CHECK(check_lcf(gt, sample_points(gt.domain(), 8, 1)).passed());

  const auto s2s2 = catalog("s2xs2");
  const auto st = conformal_metric(s2s2.metric, parse("0.2*a1 + 0.1*b2", s2s2.metric.coordinates()));
  CHECK(check_lcf(st, sample_points(st.domain(), 4, 1)).verdict == Verdict::Fail);

  const auto h3 = catalog("hyperbolic:3");
  const auto& hc = h3.metric.coordinates();
  const auto ht = conformal_metric(h3.metric, parse(hc[1] + " * " + hc[0] + " + 0.3*" + hc[2] + "^2", hc));
  CHECK(check_lcf(ht, sample_points(ht.domain(), 8, 2)).passed());
}

TEST_CASE("special mu: the conformal metric is Einstein of constant curvature") {
  for (const char* name : {"special_mu:3", "special_mu:4", "special_mu:5"}) {
    CAPTURE(name);
    const auto fx = catalog(name);
    const auto r = check_special_mu(fx.metric, *fx.potential, sample_points(fx.metric.domain(), 10, 0));
    CHECK(r.passed());
    CHECK(r.value("einstein") < 1e-8);
    CHECK(r.value("constant_curvature") < 1e-8);
    CHECK(r.value("spread(conformal_scalar)") < 1e-8);
  }
  const auto s3 = catalog("sphere:3");
  PotentialSpec trivial = *s3.potential;
  trivial.mu = -1.0;
  CHECK(check_special_mu(s3.metric, trivial, sample_points(s3.metric.domain(), 5, 0)).passed());

  const auto fx = catalog("special_mu:3");
  PotentialSpec wrong = *fx.potential;
  wrong.lambda = 0.0;
  CHECK(check_special_mu(fx.metric, wrong, sample_points(fx.metric.domain(), 5, 0)).verdict ==
        Verdict::NotApplicable);
  const auto hq = catalog("hyperbolic_qe:3:1");
  CHECK_THROWS_AS(check_special_mu(hq.metric, *hq.potential, sample_points(hq.metric.domain(), 2, 0)),
                  PreconditionError);
}

TEST_CASE("two-eigenvalue structure of the conformal Ricci tensor") {
  for (const char* name : {"hyperbolic_qe:3:1", "hyperbolic_qe:4:1", "gaussian_soliton:3",
                           "sphere_qe:3:2", "special_mu:3"}) {
    CAPTURE(name);
    const auto fx = catalog(name);
    const auto r =
        check_two_eigenvalue_structure(fx.metric, *fx.potential, sample_points(fx.metric.domain(), 10, 4));
    CHECK(r.passed());
  }
}
