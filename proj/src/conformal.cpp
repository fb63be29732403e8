#include "qeflat/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "qeflat/adapted.hpp"
#include "qeflat/errors.hpp"

namespace qeflat {

MetricSpec conformal_metric(const MetricSpec& chart, const Expression& f) {
  const int n = chart.dimension();
  if (n < 3) throw std::invalid_argument("the conformal change needs n >= 3");
  const auto& coords = chart.coordinates();
  const Expression factor = (Expression::literal(-2.0 / (n - 2), coords) * f).apply(Function::Exp);
  MetricSpec::ComponentMap components;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      if (!chart.is_zero_component(a, b)) components[{a, b}] = factor * chart.component(a, b);
    }
  }
  return MetricSpec("conformal(" + chart.name() + ")", coords, chart.domain(), components);
}

TensorValue conformal_ricci_assembly(const PointGeometry& geo) {
  const int n = geo.dimension();
  const auto& g = geo.curvature.metric.g;
  const double k = 1.0 / (n - 2);
  TensorValue out(n, downs(2), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      out(a, b) = geo.curvature.ricci(a, b) + geo.hessian(a, b) + k * geo.df(a) * geo.df(b) +
                  k * (geo.laplacian - geo.grad_norm2) * g(a, b);
    }
  }
  return out;
}

CheckReport check_conformal_ricci_formula(const MetricSpec& chart, const Expression& f,
                                          const std::vector<Point>& points,
                                          double tol_multiplier) {
  const MetricSpec tilde = conformal_metric(chart, f);
  CheckReport report("conformal_ricci");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  for (const auto& p : points) {
    const auto geo = point_geometry(chart, f, p);
    const auto rhs = conformal_ricci_assembly(geo);
    const auto lhs = ricci_scalar(tilde, p).first;
    const double scale = std::max({max_abs(lhs), max_abs(geo.curvature.ricci),
                                   max_abs(geo.hessian), max_abs(geo.df) * max_abs(geo.df)});
    report.add_point(p, {{"conformal_ricci", scaled(max_abs_difference(lhs, rhs), scale)}});
  }
  report.require("conformal_ricci", kConformalFormulaTolerance * tol_multiplier);
  report.finalize();
  return report;
}

namespace {

void gate_qe_lcf(CheckReport& report, const PointGeometry& geo, const PotentialSpec& pot,
                 Defects& defects) {
  const double residual = qe_residual_defect(geo, pot);
  report.add_gate("qe_residual", residual, kQuasiEinsteinGate);
  defects.emplace_back("qe_residual", residual);
  for (const auto& [name, v] : lcf_defects(geo.curvature)) {
    report.add_gate(name, v, kLcfGate);
    defects.emplace_back(name, v);
  }
}

}  // namespace

CheckReport check_special_mu(const MetricSpec& chart, const PotentialSpec& pot,
                             const std::vector<Point>& points, double tol_multiplier) {
  const int n = chart.dimension();
  if (n < 3) throw PreconditionError("the special-mu check needs n >= 3");
  if (!pot.is_special_mu(n)) {
    throw PreconditionError("the special-mu check requires mu = 1/(2-n) = " +
                            std::to_string(1.0 / (2.0 - n)));
  }
  const MetricSpec tilde = conformal_metric(chart, pot.f);
  CheckReport report("special_mu");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  std::vector<double> scalars;
  for (const auto& p : points) {
    Defects defects;
    gate_qe_lcf(report, point_geometry(chart, pot.f, p), pot, defects);

    const auto c = curvature_pack(tilde, p);
    const auto& gt = c.metric.g;
    const double R = c.scalar;
    double einstein = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        einstein = std::max(einstein, std::abs(c.ricci(a, b) - R / n * gt(a, b)));
      }
    }
    const double k = R / (n * (n - 1.0));
    double constant = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int cc = 0; cc < n; ++cc) {
          for (int d = 0; d < n; ++d) {
            const double model = k * (gt(a, cc) * gt(b, d) - gt(a, d) * gt(b, cc));
            constant = std::max(constant, std::abs(c.riemann(a, b, cc, d) - model));
          }
        }
      }
    }
    defects.emplace_back("einstein", scaled(einstein, max_abs(c.ricci)));
    defects.emplace_back("constant_curvature", scaled(constant, max_abs(c.riemann)));
    report.add_point(p, defects);
    scalars.push_back(R);
  }
  report.add_spread("conformal_scalar", scalars);
  const double tol = kSpecialMuTolerance * tol_multiplier;
  report.require("einstein", tol);
  report.require("constant_curvature", tol);
  report.require(spread_key("conformal_scalar"), tol);
  report.finalize();
  return report;
}

CheckReport check_two_eigenvalue_structure(const MetricSpec& chart, const PotentialSpec& pot,
                                           const std::vector<Point>& points,
                                           double tol_multiplier) {
  const int n = chart.dimension();
  if (n < 3) throw PreconditionError("the two-eigenvalue check needs n >= 3");
  const MetricSpec tilde = conformal_metric(chart, pot.f);
  CheckReport report("two_eigenvalue");
  report.source = chart.name();
  report.tol_multiplier = tol_multiplier;
  const double k1 = 1.0 / (n - 2) + pot.mu;
  for (const auto& p : points) {
    const auto geo = point_geometry(chart, pot.f, p);
    Defects defects;
    gate_qe_lcf(report, geo, pot, defects);
    if (!report.gates_passed()) {
      report.add_point(p, defects);
      continue;
    }
    const auto fr = level_set_frame(geo);
    const auto& g = geo.curvature.metric.g;
    const auto ric = ricci_scalar(tilde, p).first;

    const double k2 = (geo.laplacian - geo.grad_norm2 + (n - 2) * pot.lambda) / (n - 2);
    TensorValue display(n, downs(2), 0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) display(a, b) = k1 * geo.df(a) * geo.df(b) + k2 * g(a, b);
    }
    const double scale = max_abs(ric);
    defects.emplace_back("two_eigenvalue_display", scaled(max_abs_difference(ric, display), scale));

    // The projector's mixed form is the same for g and g~.
    TensorValue tangential(n, downs(2), 0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) {
            s += fr.projector_mixed(c, a) * ric(c, d) * fr.projector_mixed(d, b);
          }
        }
        tangential(a, b) = s;
      }
    }
    double trace = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) trace += geo.curvature.metric.g_inv(a, b) * tangential(a, b);
    }
    const double rho = trace / (n - 1);
    double tang = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        tang = std::max(tang, std::abs(tangential(a, b) - rho * fr.projector(a, b)));
      }
    }
    defects.emplace_back("tangential_multiple", scaled(tang, scale));

    double eig = 0.0;
    for (int b = 0; b < n; ++b) {
      double v = 0.0;
      for (int c = 0; c < n; ++c) {
        double rn = 0.0;
        for (int a = 0; a < n; ++a) rn += ric(a, c) * fr.normal_up(a);
        v += fr.projector_mixed(c, b) * rn;
      }
      eig = std::max(eig, std::abs(v));
    }
    defects.emplace_back("gradient_eigendirection", scaled(eig, scale));
    report.add_point(p, defects);
  }
  const double tol = kTwoEigenvalueTolerance * tol_multiplier;
  report.require("two_eigenvalue_display", tol);
  report.require("tangential_multiple", tol);
  report.require("gradient_eigendirection", tol);
  report.finalize();
  return report;
}

}  // namespace qeflat
