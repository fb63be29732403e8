#include <cmath>

#include "doctest.h"
#include "qeflat/quasi_einstein.hpp"
#include "qeflat/warp.hpp"
#include "support.hpp"

using namespace qeflat;

TEST_CASE("hyperbolic fixture against its closed form") {
  // g = dt^2 + e^{2t}(dx^2 + dy^2), f = -t: Ric = -2g, Hess f = -e^{2t} on the
  // fiber and 0 along t, so Ric + Hess f - df df = -3 g.
  const auto fx = catalog("hyperbolic_qe:3:1");
  REQUIRE(fx.potential);
  CHECK(fx.potential->mu == 1.0);
  CHECK(fx.potential->lambda == -3.0);
  SplitMix64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Point p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto geo = point_geometry(fx.metric, fx.potential->f, p);
    const double e2t = std::exp(2 * p[0]);
    CHECK(geo.df(0) == doctest::Approx(-1.0));
    CHECK(std::abs(geo.hessian(0, 0)) < 1e-12);
    CHECK(geo.hessian(1, 1) == doctest::Approx(-e2t));
    CHECK(geo.hessian(2, 2) == doctest::Approx(-e2t));
    CHECK(std::abs(geo.hessian(0, 1)) < 1e-12);
    CHECK(geo.curvature.ricci(1, 1) == doctest::Approx(-2 * e2t));
    CHECK(max_abs(qe_residual(geo, *fx.potential)) < 1e-9);
  }
  const Point t04{0.4, 0.1, -0.2};
  CHECK(check_trace_identity(fx.metric, *fx.potential, t04).passed());
  CHECK(trace_identity_defect(point_geometry(fx.metric, fx.potential->f, t04), *fx.potential) < 1e-9);
}

TEST_CASE("trivial and soliton fixtures") {
  const auto gs = catalog("gaussian_soliton:3");
  REQUIRE(gs.potential);
  CHECK(gs.potential->mu == 0.0);
  CHECK(gs.potential->lambda == 0.5);
  const Point x{1.0, 2.0, 0.0};
  const auto geo = point_geometry(gs.metric, gs.potential->f, x);
  CHECK(max_abs(qe_residual(geo, *gs.potential)) < 1e-10);
  CHECK(geo.laplacian == doctest::Approx(1.5));
  CHECK(trace_identity_defect(geo, *gs.potential) < 1e-10);
  CHECK(gradient_scalar_identity_defect(geo, *gs.potential) < 1e-10);

  const auto s3 = catalog("sphere:3");
  REQUIRE(s3.potential);
  for (const auto& p : sample_points(s3.metric.domain(), 5, 1)) {
    const auto g = point_geometry(s3.metric, s3.potential->f, p);
    CHECK(qe_residual_defect(g, *s3.potential) < 1e-8);
    CHECK(max_abs(g.curvature.scalar_gradient) < 1e-9);
    CHECK(commutator_identity_defect(g, *s3.potential) < 1e-9);
  }
}

TEST_CASE("every quasi-Einstein fixture satisfies the residual and the three identities") {
  for (const char* name :
       {"flat:3", "sphere:3", "sphere:4:2", "hyperbolic:3", "gaussian_soliton:3", "gaussian_soliton:4",
        "hyperbolic_qe:3:1", "hyperbolic_qe:3:2", "hyperbolic_qe:4:1", "hyperbolic_qe:5:-0.5",
        "special_mu:3", "special_mu:4", "sphere_qe:3:1", "sphere_qe:4:0.5", "adapted_sphere_qe:3:2",
        "adapted_hyperbolic_qe:3:-1", "adapted_gaussian_soliton:3", "s2xs2"}) {
    CAPTURE(name);
    const auto fx = catalog(name);
    REQUIRE(fx.potential);
    const auto report =
        check_quasi_einstein(fx.metric, *fx.potential, sample_points(fx.metric.domain(), 20, 7));
    CHECK(report.passed());
    CHECK(report.value("qe_residual") < 1e-8);
  }
}

TEST_CASE("the residual gate turns identities into NOT-APPLICABLE") {
  const auto fx = catalog("hyperbolic_qe:3:1");
  PotentialSpec wrong = *fx.potential;
  wrong.lambda = -2.5;
  const Point p{0.1, 0.2, 0.3};
  for (const auto& r : {check_trace_identity(fx.metric, wrong, p),
                        check_gradient_scalar_identity(fx.metric, wrong, p),
                        check_commutator_identity(fx.metric, wrong, p)}) {
    CHECK(r.verdict == Verdict::NotApplicable);
    CHECK(r.reason.find("not quasi-Einstein at point") != std::string::npos);
    CHECK(r.reason.find("qe_residual") != std::string::npos);
  }
  const auto pts = sample_points(fx.metric.domain(), 5, 0);
  CHECK(check_qe_identities(fx.metric, wrong, pts).verdict == Verdict::NotApplicable);
  CHECK(check_quasi_einstein(fx.metric, wrong, pts).verdict == Verdict::Fail);
}

TEST_CASE("identities are consequences of the equation, not of the metric alone") {
  // A random metric with an arbitrary potential is not quasi-Einstein, so the
  // commutator identity is expected to fail there while the gate reports it.
  const auto chart = qeflat::testing::random_metric(3, 12);
  const PotentialSpec pot{parse("x0 * x1", chart.coordinates()), 0.5, 1.0};
  const Point p{0.1, -0.2, 0.3};
  const auto geo = point_geometry(chart, pot.f, p);
  CHECK(qe_residual_defect(geo, pot) > 1e-3);
  CHECK(check_commutator_identity(chart, pot, p).verdict == Verdict::NotApplicable);
}

TEST_CASE("gradient identity pointwise, including the soliton limit") {
  for (const char* name : {"hyperbolic_qe:3:1", "gaussian_soliton:3"}) {
    const auto fx = catalog(name);
    for (const auto& p : sample_points(fx.metric.domain(), 10, 2)) {
      CHECK(check_gradient_scalar_identity(fx.metric, *fx.potential, p).passed());
    }
  }
}
