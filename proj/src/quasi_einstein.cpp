#include "qeflat/quasi_einstein.hpp"

#include <algorithm>
#include <cmath>

namespace qeflat {

PointGeometry point_geometry(const MetricSpec& chart, const Expression& f,
                             std::span<const double> point) {
  const int n = chart.dimension();
  PointGeometry geo;
  geo.jets = curvature_jets(chart, point);
  geo.curvature = curvature_pack(geo.jets, point);

  const std::vector<Jet3> seeds = seed(point);
  const Jet3 fj = evaluate(f, std::span<const Jet3>(seeds));
  geo.f = fj.value();

  TensorJet dfj(n, downs(1), Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) dfj(a) = fj.derivative(a);
  geo.df = values(dfj);

  // (nabla df)(a, c) = nabla_c nabla_a f, symmetric.
  geo.hessian = values(covariant_derivative(dfj, geo.jets.christoffel));

  Jet3 norm2(n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) norm2 += geo.jets.g_inv(a, b) * dfj(a) * dfj(b);
  }
  geo.grad_norm2 = norm2.value();
  geo.grad_norm2_gradient = TensorValue(n, downs(1), 0.0);
  for (int a = 0; a < n; ++a) geo.grad_norm2_gradient(a) = norm2.derivative(a).value();

  const auto& m = geo.curvature.metric;
  geo.grad = raise_lower(geo.df, 0, m);
  geo.laplacian = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) geo.laplacian += m.g_inv(a, b) * geo.hessian(a, b);
  }
  return geo;
}

TensorValue qe_residual(const PointGeometry& geo, const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& g = geo.curvature.metric.g;
  TensorValue r(n, downs(2), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      r(a, b) = geo.curvature.ricci(a, b) + geo.hessian(a, b) -
                pot.mu * geo.df(a) * geo.df(b) - pot.lambda * g(a, b);
    }
  }
  return r;
}

TensorValue qe_residual(const MetricSpec& chart, const PotentialSpec& pot,
                        std::span<const double> point) {
  return qe_residual(point_geometry(chart, pot.f, point), pot);
}

double qe_residual_defect(const PointGeometry& geo, const PotentialSpec& pot) {
  const double df2 = max_abs(geo.df) * max_abs(geo.df);
  const double scale = std::max({max_abs(geo.curvature.ricci), max_abs(geo.hessian),
                                 std::abs(pot.mu) * df2,
                                 std::abs(pot.lambda) * max_abs(geo.curvature.metric.g)});
  return scaled(max_abs(qe_residual(geo, pot)), scale);
}

double trace_identity_defect(const PointGeometry& geo, const PotentialSpec& pot) {
  const int n = geo.dimension();
  const double R = geo.curvature.scalar;
  const double mu_term = pot.mu * geo.grad_norm2;
  const double lhs = R + geo.laplacian - mu_term;
  const double rhs = n * pot.lambda;
  const double scale =
      std::max({std::abs(R), std::abs(geo.laplacian), std::abs(mu_term), std::abs(rhs)});
  return scaled(std::abs(lhs - rhs), scale);
}

double gradient_scalar_identity_defect(const PointGeometry& geo, const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& c = geo.curvature;
  const double mu = pot.mu;
  const double lambda = pot.lambda;
  double diff = 0.0;
  double scale = 0.0;
  for (int b = 0; b < n; ++b) {
    double ric_grad = 0.0;
    for (int a = 0; a < n; ++a) ric_grad += c.ricci(a, b) * geo.grad(a);
    const double terms[] = {
        2.0 * ric_grad,
        2.0 * mu * c.scalar * geo.df(b),
        -2.0 * mu * mu * geo.grad_norm2 * geo.df(b),
        -2.0 * n * mu * lambda * geo.df(b),
        mu * geo.grad_norm2_gradient(b),
    };
    double rhs = 0.0;
    for (double t : terms) {
      rhs += t;
      scale = std::max(scale, std::abs(t));
    }
    scale = std::max(scale, std::abs(c.scalar_gradient(b)));
    diff = std::max(diff, std::abs(c.scalar_gradient(b) - rhs));
  }
  return scaled(diff, scale);
}

double commutator_identity_defect(const PointGeometry& geo, const PotentialSpec& pot) {
  const int n = geo.dimension();
  const auto& c = geo.curvature;
  const auto& g = c.metric.g;
  const double mu = pot.mu;
  const double lambda = pot.lambda;
  double diff = 0.0;
  double scale = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int cc = 0; cc < n; ++cc) {
        const double lhs = c.ricci_gradient(a, b, cc) - c.ricci_gradient(a, cc, b);
        double riem = 0.0;
        for (int d = 0; d < n; ++d) riem += c.riemann(cc, b, a, d) * geo.grad(d);
        const double terms[] = {
            -riem,
            mu * (c.ricci(a, b) * geo.df(cc) - c.ricci(a, cc) * geo.df(b)),
            -lambda * mu * (g(a, b) * geo.df(cc) - g(a, cc) * geo.df(b)),
        };
        double rhs = 0.0;
        for (double t : terms) {
          rhs += t;
          scale = std::max(scale, std::abs(t));
        }
        scale = std::max(scale, std::abs(lhs));
        diff = std::max(diff, std::abs(lhs - rhs));
      }
    }
  }
  return scaled(diff, scale);
}

namespace {

using DefectFn = double (*)(const PointGeometry&, const PotentialSpec&);

CheckReport gated_single(const char* check, const char* key, DefectFn fn, const MetricSpec& chart,
                         const PotentialSpec& pot, std::span<const double> point,
                         double tol_multiplier) {
  CheckReport report(check);
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  const auto geo = point_geometry(chart, pot.f, point);
  const double residual = qe_residual_defect(geo, pot);
  report.add_gate("qe_residual", residual, kQuasiEinsteinGate);
  report.add_point(Point(point.begin(), point.end()),
                   {{"qe_residual", residual}, {key, fn(geo, pot)}});
  report.require(key, kExactIdentityTolerance * tol_multiplier);
  report.finalize();
  if (report.verdict == Verdict::NotApplicable) report.reason = "not quasi-Einstein at point; " + report.reason;
  return report;
}

Defects identity_defects(const PointGeometry& geo, const PotentialSpec& pot) {
  return {
      {"qe_residual", qe_residual_defect(geo, pot)},
      {"trace_identity", trace_identity_defect(geo, pot)},
      {"gradient_scalar_identity", gradient_scalar_identity_defect(geo, pot)},
      {"commutator_identity", commutator_identity_defect(geo, pot)},
  };
}

}  // namespace

CheckReport check_trace_identity(const MetricSpec& chart, const PotentialSpec& pot,
                                 std::span<const double> point, double tol_multiplier) {
  return gated_single("trace_identity", "trace_identity", trace_identity_defect, chart, pot, point,
                      tol_multiplier);
}

CheckReport check_gradient_scalar_identity(const MetricSpec& chart, const PotentialSpec& pot,
                                           std::span<const double> point,
                                           double tol_multiplier) {
  return gated_single("gradient_scalar_identity", "gradient_scalar_identity",
                      gradient_scalar_identity_defect, chart, pot, point, tol_multiplier);
}

CheckReport check_commutator_identity(const MetricSpec& chart, const PotentialSpec& pot,
                                      std::span<const double> point, double tol_multiplier) {
  return gated_single("commutator_identity", "commutator_identity", commutator_identity_defect,
                      chart, pot, point, tol_multiplier);
}

CheckReport check_quasi_einstein(const MetricSpec& chart, const PotentialSpec& pot,
                                 const std::vector<Point>& points, double tol_multiplier) {
  CheckReport report("qe");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  for (const auto& p : points) {
    report.add_point(p, identity_defects(point_geometry(chart, pot.f, p), pot));
  }
  const double tol = kExactIdentityTolerance * tol_multiplier;
  for (const char* key :
       {"qe_residual", "trace_identity", "gradient_scalar_identity", "commutator_identity"}) {
    report.require(key, tol);
  }
  report.finalize();
  return report;
}

CheckReport check_qe_identities(const MetricSpec& chart, const PotentialSpec& pot,
                                   const std::vector<Point>& points, double tol_multiplier) {
  CheckReport report("identities");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  for (const auto& p : points) {
    const auto defects = identity_defects(point_geometry(chart, pot.f, p), pot);
    report.add_gate("qe_residual", defects.front().second, kQuasiEinsteinGate);
    report.add_point(p, defects);
  }
  const double tol = kExactIdentityTolerance * tol_multiplier;
  for (const char* key : {"trace_identity", "gradient_scalar_identity", "commutator_identity"}) {
    report.require(key, tol);
  }
  report.finalize();
  if (report.verdict == Verdict::NotApplicable) report.reason = "not quasi-Einstein; " + report.reason;
  return report;
}

}  // namespace qeflat
