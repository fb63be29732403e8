#include "doctest.h"
#include "qeflat/curvature.hpp"
#include "qeflat/quasi_einstein.hpp"
#include "qeflat/tensor.hpp"
#include "support.hpp"

using namespace qeflat;
using qeflat::testing::random_metric;
using qeflat::testing::random_point;

namespace {

TensorValue random_tensor(int n, std::vector<Variance> v, SplitMix64& rng) {
  TensorValue t(n, std::move(v), 0.0);
  for (auto& c : t.components()) c = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("lowering the up slot of the inverse metric gives the identity") {
  const auto chart = random_metric(4, 3);
  const double p[] = {0.1, -0.2, 0.3, 0.05};
  const auto m = make_metric_at_point(chart.metric_values(p));
  TensorValue ginv(4, {Variance::Up, Variance::Up}, 0.0);
  for (std::size_t k = 0; k < ginv.size(); ++k) ginv[k] = m.g_inv[k];
  const auto delta = raise_lower(ginv, 0, m);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(delta(a, b) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
  const auto trace = contract(delta, 0, 1);
  CHECK(trace[0] == doctest::Approx(4.0));
}

TEST_CASE("raise then lower is the identity on every slot") {
  SplitMix64 rng(11);
  for (int n : {2, 3, 5}) {
    const auto chart = random_metric(n, 100 + n);
    const auto p = random_point(n, rng);
    const auto m = make_metric_at_point(chart.metric_values(p));
    const auto t = random_tensor(n, downs(3), rng);
    for (int slot = 0; slot < 3; ++slot) {
      const auto back = raise_lower(raise_lower(t, slot, m), slot, m);
      CHECK(max_abs_difference(back, t) < 1e-12);
    }
  }
}

TEST_CASE("contraction rules") {
  const TensorValue t(3, downs(2), 1.0);
  CHECK_THROWS_AS(contract(t, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(contract(t, 0, 0), std::out_of_range);
  CHECK_THROWS_AS(contract(t, 0, 2), std::out_of_range);
}

TEST_CASE("metric validation") {
  TensorValue g(2, downs(2), 0.0);
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  CHECK_THROWS_AS(make_metric_at_point(g), PreconditionError);
  g(1, 1) = 1.0;
  g(0, 1) = 0.5;
  CHECK_THROWS_AS(make_metric_at_point(g), PreconditionError);
  g(1, 0) = 0.5;
  CHECK(make_metric_at_point(g).det == doctest::Approx(0.75));
}

TEST_CASE("Ricci of the unit sphere raised is the identity") {
  const auto s2 = MetricSpec::from_text("S2", {"th", "ph"}, {{0.5, 2.5}, {0.0, 6.0}},
                                        {{{0, 0}, "1"}, {{1, 1}, "sin(th)^2"}});
  const double p[] = {1.0, 0.3};
  const auto pack = curvature_pack(s2, p);
  const auto mixed = raise_lower(pack.ricci, 0, pack.metric);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(mixed(a, b) == doctest::Approx(a == b ? 1.0 : 0.0));
  const auto o = qeflat::testing::oracle_curvature(s2, {1.0, 0.3});
  CHECK(o.ricci[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("flat Riemann contracts to zero and the Weyl tensor of S4 is trace-free") {
  const auto flat = MetricSpec::from_text("flat", {"x", "y", "z"},
                                          std::vector<Interval>(3, Interval{-1, 1}),
                                          {{{0, 0}, "1"}, {{1, 1}, "1"}, {{2, 2}, "1"}});
  const double p[] = {0.2, 0.3, -0.4};
  const auto pack = curvature_pack(flat, p);
  CHECK(max_abs(contract(raise_lower(pack.riemann, 0, pack.metric), 0, 3)) == 0.0);

  const auto s4 = MetricSpec::from_text(
      "S4", {"a", "b", "c", "d"}, std::vector<Interval>(4, Interval{0.3, 2.8}),
      {{{0, 0}, "1"},
       {{1, 1}, "sin(a)^2"},
       {{2, 2}, "sin(a)^2 * sin(b)^2"},
       {{3, 3}, "sin(a)^2 * sin(b)^2 * sin(c)^2"}});
  const double q[] = {1.1, 0.9, 1.7, 0.4};
  const auto w = weyl(s4, q);
  const auto m = make_metric_at_point(s4.metric_values(q));
  CHECK(max_abs(contract(raise_lower(w, 0, m), 0, 2)) < 1e-9);
  CHECK(max_abs(w) < 1e-9);
}

TEST_CASE("covariant derivatives") {
  SplitMix64 rng(5);
  for (int n : {3, 4}) {
    const auto chart = random_metric(n, 40 + n);
    const auto p = random_point(n, rng);
    const auto jets = curvature_jets(chart, p);
    CHECK(max_abs(values(covariant_derivative(jets.g, jets.christoffel))) < 1e-9);
  }

  const auto flat = MetricSpec::from_text("flat", {"x", "y", "z"},
                                          std::vector<Interval>(3, Interval{-1, 1}),
                                          {{{0, 0}, "1"}, {{1, 1}, "1"}, {{2, 2}, "1"}});
  const double p[] = {0.7, -0.1, 0.2};
  const auto geo = point_geometry(flat, parse("(x^2 + y^2 + z^2)/4", {"x", "y", "z"}), p);
  for (int a = 0; a < 3; ++a) {
    CHECK(geo.df(a) == doctest::Approx(p[a] / 2));
    for (int b = 0; b < 3; ++b) CHECK(geo.hessian(a, b) == doctest::Approx(a == b ? 0.5 : 0.0));
  }
}
