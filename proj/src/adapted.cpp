#include "qeflat/adapted.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qeflat/errors.hpp"

namespace qeflat {

namespace {

double lcf_gate_value(const CurvaturePack& pack) {
  double v = 0.0;
  for (const auto& [name, d] : lcf_defects(pack)) v = std::max(v, d);
  return v;
}

double sq(double x) { return x * x; }

// P^a_b v^b for a contravariant vector.
std::vector<double> project(const LevelSetFrame& fr, std::span<const double> v) {
  const int n = fr.projector.dimension();
  std::vector<double> out(n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out[a] += fr.projector_mixed(a, b) * v[b];
  }
  return out;
}

double inner(const TensorValue& g, std::span<const double> x, std::span<const double> y) {
  const int n = g.dimension();
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) s += g(a, b) * x[a] * y[b];
  }
  return s;
}

double bilinear(const TensorValue& t, std::span<const double> x, std::span<const double> y) {
  return inner(t, x, y);
}

// Tangential part of a covector, v_b - n_b (n^a v_a), as an invariant norm.
double tangential_norm(const TensorValue& v, const LevelSetFrame& fr, const MetricAtPoint& m) {
  const int n = v.dimension();
  double along = 0.0;
  for (int a = 0; a < n; ++a) along += fr.normal_up(a) * v(a);
  TensorValue t(n, downs(1), 0.0);
  for (int b = 0; b < n; ++b) t(b) = v(b) - fr.normal(b) * along;
  return tensor_norm(t, m);
}

void check_same_level(const MetricSpec& chart, const PotentialSpec& pot,
                      const std::vector<Point>& points, double level) {
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != chart.dimension()) {
      throw PreconditionError("point has the wrong number of coordinates");
    }
    const double v = evaluate(pot.f, std::span<const double>(p));
    if (std::abs(v - level) > 1e-9 * std::max(1.0, std::abs(level))) {
      std::ostringstream msg;
      msg << "points are not on a common level set of f (f = " << v << ", expected " << level
          << ")";
      throw PreconditionError(msg.str());
    }
  }
}

}  // namespace

LevelSetFrame level_set_frame(const PointGeometry& geo) {
  const int n = geo.dimension();
  const auto& m = geo.curvature.metric;
  LevelSetFrame fr;
  fr.point = geo.curvature.point;
  fr.grad = geo.grad;
  fr.grad_norm2 = geo.grad_norm2;
  fr.grad_norm = std::sqrt(std::max(geo.grad_norm2, 0.0));
  if (!(fr.grad_norm > kRegularityThreshold)) {
    std::ostringstream msg;
    msg << "regular point required: |grad f| = " << fr.grad_norm << " is not above "
        << kRegularityThreshold;
    throw PreconditionError(msg.str());
  }
  fr.normal = TensorValue(n, downs(1), 0.0);
  fr.normal_up = TensorValue(n, {Variance::Up}, 0.0);
  for (int a = 0; a < n; ++a) {
    fr.normal(a) = geo.df(a) / fr.grad_norm;
    fr.normal_up(a) = geo.grad(a) / fr.grad_norm;
  }
  fr.projector = TensorValue(n, downs(2), 0.0);
  fr.projector_mixed = TensorValue(n, {Variance::Up, Variance::Down}, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      fr.projector(a, b) = m.g(a, b) - fr.normal(a) * fr.normal(b);
      fr.projector_mixed(a, b) = (a == b ? 1.0 : 0.0) - fr.normal_up(a) * fr.normal(b);
    }
  }

  bool adapted = std::abs(geo.df(0) - 1.0) <= 1e-12;
  for (int j = 1; j < n && adapted; ++j) {
    adapted = std::abs(geo.df(j)) <= 1e-12 && std::abs(m.g_inv(0, j)) <= 1e-12;
  }
  fr.is_adapted_chart = adapted;
  if (adapted && std::abs(m.g_inv(0, 0) - geo.grad_norm2) > 1e-10 * std::max(1.0, geo.grad_norm2)) {
    throw PreconditionError("adapted chart: g^00 differs from |grad f|^2");
  }
  return fr;
}

LevelSetFrame frame(const MetricSpec& chart, const PotentialSpec& pot,
                    std::span<const double> point) {
  return level_set_frame(point_geometry(chart, pot.f, point));
}

Defects frame_defects(const LevelSetFrame& fr) {
  const int n = fr.projector.dimension();
  double idem = 0.0;
  double pn = 0.0;
  double trace = 0.0;
  for (int a = 0; a < n; ++a) {
    trace += fr.projector_mixed(a, a);
    double v = 0.0;
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += fr.projector_mixed(a, c) * fr.projector_mixed(c, b);
      idem = std::max(idem, std::abs(s - fr.projector_mixed(a, b)));
      v += fr.projector(a, b) * fr.normal_up(b);
    }
    pn = std::max(pn, std::abs(v));
  }
  return {{"projector_idempotent", idem},
          {"projector_normal", pn},
          {"projector_trace", std::abs(trace - (n - 1))}};
}

SecondFundamentalForm second_fundamental_form(const PointGeometry& geo, const LevelSetFrame& fr,
                                              const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& g = geo.curvature.metric.g;
  // Both sides sandwiched as P_a^c T_cd P^d_b, with P_a^c = P^c_a.
  auto sandwich = [&](auto&& t) {
    TensorValue out(n, downs(2), 0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) {
            s += fr.projector_mixed(c, a) * t(c, d) * fr.projector_mixed(d, b);
          }
        }
        out(a, b) = s / fr.grad_norm;
      }
    }
    return out;
  };
  SecondFundamentalForm h;
  h.via_hessian = sandwich([&](int c, int d) { return -geo.hessian(c, d); });
  h.via_ricci =
      sandwich([&](int c, int d) { return geo.curvature.ricci(c, d) - pot.lambda * g(c, d); });
  h.two_path = scaled(max_abs_difference(h.via_hessian, h.via_ricci),
                      std::max(max_abs(h.via_hessian), max_abs(h.via_ricci)));
  return h;
}

SecondFundamentalForm second_fundamental_form(const MetricSpec& chart, const PotentialSpec& pot,
                                              std::span<const double> point) {
  const auto geo = point_geometry(chart, pot.f, point);
  return second_fundamental_form(geo, level_set_frame(geo), pot);
}

MeanCurvature mean_curvature(const PointGeometry& geo, const LevelSetFrame& fr,
                             const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& m = geo.curvature.metric;
  const auto h = second_fundamental_form(geo, fr, pot);
  MeanCurvature H;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) H.via_trace += m.g_inv(a, b) * h.via_hessian(a, b);
  }
  const double ric_nn = bilinear(geo.curvature.ricci, fr.normal_up.components(),
                                 fr.normal_up.components());
  H.via_formula = (geo.curvature.scalar - ric_nn - (n - 1) * pot.lambda) / fr.grad_norm;
  H.two_path = scaled(std::abs(H.via_trace - H.via_formula),
                      std::max(std::abs(H.via_trace), std::abs(H.via_formula)));
  return H;
}

MeanCurvature mean_curvature(const MetricSpec& chart, const PotentialSpec& pot,
                             std::span<const double> point) {
  const auto geo = point_geometry(chart, pot.f, point);
  return mean_curvature(geo, level_set_frame(geo), pot);
}

double umbilicity_defect(const TensorValue& h, double mean, const LevelSetFrame& fr) {
  const int n = h.dimension();
  double diff = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      diff = std::max(diff, std::abs(h(a, b) - mean / (n - 1) * fr.projector(a, b)));
    }
  }
  return scaled(diff, max_abs(h));
}

double umbilicity_defect(const MetricSpec& chart, const PotentialSpec& pot,
                         std::span<const double> point) {
  const auto geo = point_geometry(chart, pot.f, point);
  const auto fr = level_set_frame(geo);
  const auto h = second_fundamental_form(geo, fr, pot);
  return umbilicity_defect(h.via_hessian, mean_curvature(geo, fr, pot).via_trace, fr);
}

FiberCurvature fiber_sectional_curvature(const PointGeometry& geo, const LevelSetFrame& fr,
                                         const PotentialSpec& pot, std::span<const double> x,
                                         std::span<const double> y) {
  const int n = geo.dimension();
  if (n < 3) throw std::invalid_argument("level sets need dimension >= 2 for sectional curvature");
  const auto& g = geo.curvature.metric.g;
  std::vector<double> X = project(fr, x);
  std::vector<double> Y = project(fr, y);
  const double xs = std::sqrt(std::max(inner(g, X, X), 0.0));
  const double ys0 = std::sqrt(std::max(inner(g, Y, Y), 0.0));
  if (!(xs > 1e-12) || !(ys0 > 1e-12)) throw PreconditionError("degenerate plane: zero tangent vector");
  for (double& v : X) v /= xs;
  const double xy = inner(g, X, Y);
  for (int a = 0; a < n; ++a) Y[a] -= xy * X[a];
  const double ys = std::sqrt(std::max(inner(g, Y, Y), 0.0));
  if (!(ys > 1e-6 * ys0)) throw PreconditionError("degenerate plane: tangent vectors are parallel");
  for (double& v : Y) v /= ys;

  const auto h = second_fundamental_form(geo, fr, pot).via_hessian;
  double rxyxy = 0.0;
  const auto& R = geo.curvature.riemann;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) rxyxy += R(a, b, c, d) * X[a] * Y[b] * X[c] * Y[d];
      }
    }
  }
  FiberCurvature k;
  k.gauss = rxyxy + bilinear(h, X, X) * bilinear(h, Y, Y) - sq(bilinear(h, X, Y));

  const double H = mean_curvature(geo, fr, pot).via_trace;
  const double n1 = n - 1.0;
  const double n2 = n - 2.0;
  k.closed_form = 2.0 / (n1 * n2) * H * fr.grad_norm + 2.0 / n2 * pot.lambda -
                  geo.curvature.scalar / (n1 * n2) + H * H / (n1 * n1);
  k.two_path = scaled(std::abs(k.gauss - k.closed_form),
                      std::max(std::abs(k.gauss), std::abs(k.closed_form)));
  return k;
}

FiberCurvature fiber_sectional_curvature(const MetricSpec& chart, const PotentialSpec& pot,
                                         std::span<const double> point, std::span<const double> x,
                                         std::span<const double> y) {
  const auto geo = point_geometry(chart, pot.f, point);
  return fiber_sectional_curvature(geo, level_set_frame(geo), pot, x, y);
}

Defects tangential_defects(const PointGeometry& geo, const LevelSetFrame& fr) {
  const int n = geo.dimension();
  const auto& m = geo.curvature.metric;
  TensorValue ric_n(n, downs(1), 0.0);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) ric_n(b) += geo.curvature.ricci(a, b) * fr.normal_up(a);
  }
  return {
      {"tangential_ricci",
       scaled(tangential_norm(ric_n, fr, m), tensor_norm(geo.curvature.ricci, m))},
      {"tangential_grad_scalar", scaled(tangential_norm(geo.curvature.scalar_gradient, fr, m),
                                        tensor_norm(geo.curvature.scalar_gradient, m))},
      {"tangential_grad_norm2", scaled(tangential_norm(geo.grad_norm2_gradient, fr, m),
                                       tensor_norm(geo.grad_norm2_gradient, m))},
  };
}

CheckReport check_level_set_constancy(const MetricSpec& chart, const PotentialSpec& pot,
                                      const std::vector<Point>& points, double tol_multiplier) {
  if (points.empty()) throw PreconditionError("no points given");
  const double level = evaluate(pot.f, std::span<const double>(points.front()));
  check_same_level(chart, pot, points, level);

  CheckReport report("levelsets");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  std::vector<double> scal, norm2, ric_nn, mean;
  for (const auto& p : points) {
    const auto geo = point_geometry(chart, pot.f, p);
    const auto fr = level_set_frame(geo);
    report.add_point(p, tangential_defects(geo, fr));
    scal.push_back(geo.curvature.scalar);
    norm2.push_back(geo.grad_norm2);
    ric_nn.push_back(bilinear(geo.curvature.ricci, fr.normal_up.components(),
                              fr.normal_up.components()));
    mean.push_back(mean_curvature(geo, fr, pot).via_trace);
  }
  report.add_spread("scalar", scal);
  report.add_spread("grad_norm2", norm2);
  report.add_spread("ricci_normal", ric_nn);
  report.add_spread("mean_curvature", mean);
  const double tol = kConclusionTolerance * tol_multiplier;
  for (const auto& [name, v] : report.aggregate) report.require(name, tol);
  report.finalize();
  return report;
}

AdaptedChartSpec make_adapted_chart(MetricSpec metric, PotentialSpec potential,
                                    std::uint64_t seed) {
  const int n = metric.dimension();
  for (int j = 1; j < n; ++j) {
    if (metric.is_zero_component(0, j)) continue;
    for (const auto& p : sample_points(metric.domain(), 8, seed)) {
      const double v = evaluate(metric.component(0, j), std::span<const double>(p));
      if (std::abs(v) > 1e-14) {
        throw PreconditionError("chart is not adapted: g_0" + std::to_string(j) +
                                " does not vanish");
      }
    }
  }
  for (const auto& p : sample_points(metric.domain(), 8, seed)) {
    const double v = evaluate(potential.f, std::span<const double>(p));
    if (std::abs(v - p[0]) > 1e-12 * std::max(1.0, std::abs(p[0]))) {
      throw PreconditionError("chart is not adapted: f differs from the first coordinate '" +
                              metric.coordinates().front() + "'");
    }
  }
  return {std::move(metric), std::move(potential)};
}

namespace {

struct AdaptedPointDefects {
  Defects common;          // gated by the QE residual only
  double tangential = 0.0;  // id3_tangential
  double lcf = 0.0;
  double residual = 0.0;
};

AdaptedPointDefects adapted_identity_defects(const PointGeometry& geo, const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& c = geo.curvature;
  const auto& g = c.metric.g;
  const double mu = pot.mu;
  const double lambda = pot.lambda;
  const double N = geo.grad_norm2;
  const double R = c.scalar;
  const auto& dN = geo.grad_norm2_gradient;

  auto defect = [](double lhs, double rhs, std::initializer_list<double> terms) {
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return std::pair{std::abs(lhs - rhs), scale};
  };
  double id1 = 0, id1s = 0, id2 = 0, id2s = 0, id3 = 0, id3s = 0;
  for (int j = 1; j < n; ++j) {
    auto [d1, s1] = defect(dN(j), -2.0 * N * c.ricci(0, j), {});
    id1 = std::max(id1, d1), id1s = std::max(id1s, s1);
    auto [d2, s2] = defect(c.scalar_gradient(j), 2.0 * (1.0 - mu) * N * c.ricci(0, j),
                           {2.0 * N * c.ricci(0, j)});
    id2 = std::max(id2, d2), id2s = std::max(id2s, s2);
    const double lhs3 = c.ricci_gradient(j, 0, 0) - c.ricci_gradient(0, 0, j);
    auto [d3, s3] = defect(lhs3, mu * c.ricci(0, j),
                           {c.ricci_gradient(j, 0, 0), c.ricci_gradient(0, 0, j)});
    id3 = std::max(id3, d3), id3s = std::max(id3s, s3);
  }
  const double t1[] = {-2.0 * N * c.ricci(0, 0), 2.0 * mu * N, 2.0 * lambda};
  auto [d12, s12] = defect(dN(0), t1[0] + t1[1] + t1[2], {t1[0], t1[1], t1[2]});
  const double t2[] = {2.0 * (1.0 - mu) * N * c.ricci(0, 0), -2.0 * (n - 1) * mu * lambda,
                       2.0 * mu * R};
  auto [d22, s22] = defect(c.scalar_gradient(0), t2[0] + t2[1] + t2[2], {t2[0], t2[1], t2[2]});

  const double n1 = n - 1.0;
  const double n2 = n - 2.0;
  double id32 = 0, id32s = 0;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const double lhs = c.ricci_gradient(i, j, 0) - c.ricci_gradient(i, 0, j);
      const double terms[] = {
          (mu * n2 + 1.0) / n2 * c.ricci(i, j),
          c.ricci(0, 0) * N * g(i, j) / n2,
          -R * g(i, j) / (n1 * n2),
          -lambda * mu * g(i, j),
      };
      auto [d, s] = defect(lhs, terms[0] + terms[1] + terms[2] + terms[3],
                           {terms[0], terms[1], terms[2], terms[3], c.ricci_gradient(i, j, 0),
                            c.ricci_gradient(i, 0, j)});
      id32 = std::max(id32, d), id32s = std::max(id32s, s);
    }
  }
  AdaptedPointDefects out;
  out.residual = qe_residual_defect(geo, pot);
  out.lcf = lcf_gate_value(c);
  out.common = {{"id1", scaled(id1, id1s)},
                {"id1_radial", scaled(d12, s12)},
                {"id2", scaled(id2, id2s)},
                {"id2_radial", scaled(d22, s22)},
                {"id3", scaled(id3, id3s)}};
  out.tangential = scaled(id32, id32s);
  return out;
}

PointGeometry adapted_geometry(const AdaptedChartSpec& chart, const Point& p) {
  auto geo = point_geometry(chart.metric, chart.potential.f, p);
  if (!level_set_frame(geo).is_adapted_chart) {
    throw PreconditionError("chart is not adapted at the sampled point");
  }
  return geo;
}

// Asserts `lcf_key` only when the LCF gate held at every point; otherwise the
// value stays in the report as information.
void finish_lcf_conditional(CheckReport& report, const std::string& lcf_key, double max_lcf,
                            double tol) {
  report.merge_max("lcf_defect", max_lcf);
  if (max_lcf <= kLcfGate) report.require(lcf_key, tol);
  report.finalize();
  if (report.verdict == Verdict::Pass && max_lcf > kLcfGate) {
    report.reason = "'" + lcf_key + "' not asserted: metric is not locally conformally flat";
  }
}

}  // namespace

CheckReport check_adapted_identities(const AdaptedChartSpec& chart,
                                     const std::vector<Point>& points, double tol_multiplier) {
  CheckReport report("adapted_identities");
  report.source = chart.metric.name();
  report.tol_multiplier = tol_multiplier;
  double max_lcf = 0.0;
  for (const auto& p : points) {
    const auto d = adapted_identity_defects(adapted_geometry(chart, p), chart.potential);
    report.add_gate("qe_residual", d.residual, kQuasiEinsteinGate);
    Defects all = d.common;
    all.emplace_back("id3_tangential", d.tangential);
    report.add_point(p, all);
    max_lcf = std::max(max_lcf, d.lcf);
  }
  const double tol = kConclusionTolerance * tol_multiplier;
  for (const char* key : {"id1", "id1_radial", "id2", "id2_radial", "id3"}) {
    report.require(key, tol);
  }
  finish_lcf_conditional(report, "id3_tangential", max_lcf, tol);
  return report;
}

CottonDisplays cotton_displays(const PointGeometry& geo, const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& c = geo.curvature;
  const auto fr = level_set_frame(geo);
  const auto h = second_fundamental_form(geo, fr, pot).via_hessian;
  const double H = mean_curvature(geo, fr, pot).via_trace;
  const double k = pot.mu * (n - 2) + 1.0;
  CottonDisplays out;
  out.c0j0_lhs = TensorValue(n, downs(1), 0.0);
  out.c0j0_rhs = TensorValue(n, downs(1), 0.0);
  out.cij0_lhs = TensorValue(n, downs(2), 0.0);
  out.cij0_rhs = TensorValue(n, downs(2), 0.0);
  for (int j = 1; j < n; ++j) {
    out.c0j0_lhs(j) = c.cotton(0, j, 0);
    out.c0j0_rhs(j) = k / (n - 1) * c.ricci(0, j);
    for (int i = 1; i < n; ++i) {
      out.cij0_lhs(i, j) = c.cotton(i, j, 0);
      out.cij0_rhs(i, j) =
          k / (n - 2) * (h(i, j) - H / (n - 1) * c.metric.g(i, j)) * fr.grad_norm;
    }
  }
  return out;
}

CheckReport cotton_component_checks(const AdaptedChartSpec& chart,
                                    const std::vector<Point>& points, double tol_multiplier) {
  CheckReport report("cotton_components");
  report.source = chart.metric.name();
  report.tol_multiplier = tol_multiplier;
  double max_lcf = 0.0;
  for (const auto& p : points) {
    const auto geo = adapted_geometry(chart, p);
    report.add_gate("qe_residual", qe_residual_defect(geo, chart.potential), kQuasiEinsteinGate);
    max_lcf = std::max(max_lcf, lcf_gate_value(geo.curvature));
    const auto d = cotton_displays(geo, chart.potential);
    const double scale = max_abs(geo.curvature.ricci_gradient);
    report.add_point(p, {{"cotton_0j0", scaled(max_abs_difference(d.c0j0_lhs, d.c0j0_rhs), scale)},
                         {"cotton_ij0", scaled(max_abs_difference(d.cij0_lhs, d.cij0_rhs), scale)}});
  }
  const double tol = kConclusionTolerance * tol_multiplier;
  report.require("cotton_0j0", tol);
  finish_lcf_conditional(report, "cotton_ij0", max_lcf, tol);
  return report;
}

CheckReport theorem_verdict(const MetricSpec& chart, const PotentialSpec& pot,
                            const SamplePlan& plan, double tol_multiplier) {
  const int n = chart.dimension();
  if (n < 3) throw PreconditionError("the warped-product check needs n >= 3");
  if (pot.is_special_mu(n)) {
    throw PreconditionError("mu = 1/(2-n): use the conformal special-case check");
  }
  if (plan.planes_per_point < 1) throw PreconditionError("at least one plane per point required");
  if (plan.levels.empty()) throw PreconditionError("the sample plan has no level sets");

  CheckReport report("theorem");
  report.source = chart.name();
  report.seed = plan.seed;
  report.tol_multiplier = tol_multiplier;
  SplitMix64 rng(plan.seed ^ 0x5DEECE66DULL);
  auto random_vector = [&] {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
  };

  for (const auto& level : plan.levels) {
    check_same_level(chart, pot, level.points, level.level);
    std::vector<double> scal, norm2, ric_nn, mean, fiber;
    for (const auto& p : level.points) {
      const auto geo = point_geometry(chart, pot.f, p);
      const double residual = qe_residual_defect(geo, pot);
      const Defects lcf = lcf_defects(geo.curvature);
      report.add_gate("qe_residual", residual, kQuasiEinsteinGate);
      for (const auto& [name, v] : lcf) report.add_gate(name, v, kLcfGate);
      Defects defects{{"qe_residual", residual}};
      defects.insert(defects.end(), lcf.begin(), lcf.end());
      if (!report.gates_passed()) {
        report.add_point(p, defects);
        continue;
      }

      const auto fr = level_set_frame(geo);
      const auto tang = tangential_defects(geo, fr);
      defects.insert(defects.end(), tang.begin(), tang.end());
      const auto h = second_fundamental_form(geo, fr, pot);
      const auto H = mean_curvature(geo, fr, pot);
      defects.emplace_back("umbilicity", umbilicity_defect(h.via_hessian, H.via_trace, fr));
      defects.emplace_back("h_two_path", h.two_path);
      defects.emplace_back("H_two_path", H.two_path);

      double fiber_two_path = 0.0;
      for (int k = 0; k < plan.planes_per_point; ++k) {
        FiberCurvature fc;
        for (int attempt = 0;; ++attempt) {
          const auto x = random_vector();
          const auto y = random_vector();
          try {
            fc = fiber_sectional_curvature(geo, fr, pot, x, y);
            break;
          } catch (const PreconditionError&) {
            if (attempt >= 16) throw;
          }
        }
        fiber.push_back(fc.gauss);
        fiber_two_path = std::max(fiber_two_path, fc.two_path);
      }
      defects.emplace_back("fiber_two_path", fiber_two_path);
      report.add_point(p, defects);

      scal.push_back(geo.curvature.scalar);
      norm2.push_back(geo.grad_norm2);
      ric_nn.push_back(
          bilinear(geo.curvature.ricci, fr.normal_up.components(), fr.normal_up.components()));
      mean.push_back(H.via_trace);
    }
    report.add_spread("scalar", scal);
    report.add_spread("grad_norm2", norm2);
    report.add_spread("ricci_normal", ric_nn);
    report.add_spread("mean_curvature", mean);
    report.add_spread("fiber_curvature", fiber);
  }

  const double tol = kConclusionTolerance * tol_multiplier;
  for (const char* key : {"tangential_ricci", "tangential_grad_scalar", "tangential_grad_norm2",
                          "umbilicity"}) {
    report.require(key, tol);
  }
  for (const char* key :
       {"scalar", "grad_norm2", "ricci_normal", "mean_curvature", "fiber_curvature"}) {
    report.require(spread_key(key), tol);
  }
  for (const char* key : {"h_two_path", "H_two_path", "fiber_two_path"}) {
    report.require(key, kTwoPathTolerance * tol_multiplier);
  }
  report.finalize();
  return report;
}

}  // namespace qeflat
