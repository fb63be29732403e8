#pragma once

// The conformal change g~ = exp(-2f/(n-2)) g and the checks built on it:
//   Ric~ = Ric + Hess f + df (x) df / (n-2) + (Lap f - |grad f|^2) g / (n-2)
// for any (g, f); g~ Einstein of constant curvature when mu = 1/(2-n); and,
// under the QE equation,
//   Ric~ = (1/(n-2) + mu) df (x) df + (Lap f - |grad f|^2 + (n-2) lambda) g / (n-2).

#include <vector>

#include "qeflat/chart.hpp"
#include "qeflat/quasi_einstein.hpp"
#include "qeflat/report.hpp"

namespace qeflat {

inline constexpr double kConformalFormulaTolerance = 1e-6;
inline constexpr double kSpecialMuTolerance = 1e-8;
inline constexpr double kTwoEigenvalueTolerance = 1e-7;

/// Components exp(-2 f/(n-2)) * g_ab as expression trees; n >= 3.
MetricSpec conformal_metric(const MetricSpec& chart, const Expression& f);

/// Right-hand side of the conformal Ricci formula from g-quantities.
TensorValue conformal_ricci_assembly(const PointGeometry& geo);

/// Ungated: holds for every metric and every f.
CheckReport check_conformal_ricci_formula(const MetricSpec& chart, const Expression& f,
                                          const std::vector<Point>& points,
                                          double tol_multiplier = 1.0);

/// Einstein and constant-curvature defects of g~ plus the spread of its scalar
/// curvature. Requires mu = 1/(2-n) (PreconditionError otherwise); gated on
/// the QE residual and local conformal flatness.
CheckReport check_special_mu(const MetricSpec& chart, const PotentialSpec& pot,
                             const std::vector<Point>& points, double tol_multiplier = 1.0);

/// The two-eigenvalue form of Ric~, that Ric~ restricted to the level set is
/// a multiple of g~ there, and that grad f is an eigendirection.
CheckReport check_two_eigenvalue_structure(const MetricSpec& chart, const PotentialSpec& pot,
                                           const std::vector<Point>& points,
                                           double tol_multiplier = 1.0);

}  // namespace qeflat
