#pragma once

// Geometry of the level sets of f: unit normal, projector, second fundamental
// form, mean curvature, sectional curvature of the level set, the identities
// that hold in a chart whose first coordinate is f, and the aggregated
// warped-product verdict.
//
// Orientation: n = grad f / |grad f| and h = -P (Hess f) P / |grad f|.
// Under this choice the fibers of dt^2 + e^{2t} delta with f = -t have h = P.

#include <cstdint>
#include <span>
#include <vector>

#include "qeflat/chart.hpp"
#include "qeflat/quasi_einstein.hpp"
#include "qeflat/report.hpp"

namespace qeflat {

inline constexpr double kRegularityThreshold = 1e-8;
inline constexpr double kLcfGate = 1e-6;
inline constexpr double kConclusionTolerance = 1e-7;
inline constexpr double kTwoPathTolerance = 1e-8;

struct LevelSetFrame {
  Point point;
  TensorValue grad;             // grad^a f
  double grad_norm2 = 0.0;      // |grad f|^2
  double grad_norm = 0.0;
  TensorValue normal;           // n_a
  TensorValue normal_up;        // n^a
  TensorValue projector;        // P_ab = g_ab - n_a n_b
  TensorValue projector_mixed;  // P^a_b
  bool is_adapted_chart = false;
};

/// Throws PreconditionError ("regular point required") when |grad f| <= kRegularityThreshold.
LevelSetFrame level_set_frame(const PointGeometry& geo);
LevelSetFrame frame(const MetricSpec& chart, const PotentialSpec& pot,
                    std::span<const double> point);

/// Scaled residuals of P^2 = P, P n = 0 and tr P = n - 1.
Defects frame_defects(const LevelSetFrame& frame);

struct SecondFundamentalForm {
  TensorValue via_hessian;  // -P Hess f P / |grad f|
  TensorValue via_ricci;    // P (Ric - lambda g) P / |grad f|, equal under the QE equation
  double two_path = 0.0;    // scaled max difference
};

SecondFundamentalForm second_fundamental_form(const PointGeometry& geo, const LevelSetFrame& frame,
                                              const PotentialSpec& pot);
SecondFundamentalForm second_fundamental_form(const MetricSpec& chart, const PotentialSpec& pot,
                                              std::span<const double> point);

struct MeanCurvature {
  double via_trace = 0.0;    // tr h
  double via_formula = 0.0;  // (R - Ric(n,n) - (n-1) lambda) / |grad f|
  double two_path = 0.0;
};

MeanCurvature mean_curvature(const PointGeometry& geo, const LevelSetFrame& frame,
                             const PotentialSpec& pot);
MeanCurvature mean_curvature(const MetricSpec& chart, const PotentialSpec& pot,
                             std::span<const double> point);

/// |h - H/(n-1) P|_inf scaled by max(1, |h|_inf).
double umbilicity_defect(const TensorValue& h, double mean, const LevelSetFrame& frame);
double umbilicity_defect(const MetricSpec& chart, const PotentialSpec& pot,
                         std::span<const double> point);

struct FiberCurvature {
  double gauss = 0.0;        // R(X,Y,X,Y) + h(X,X) h(Y,Y) - h(X,Y)^2
  double closed_form = 0.0;  // from H, |grad f|, lambda, R; valid under the gates
  double two_path = 0.0;
};

/// Sectional curvature of the level set through the point for the plane
/// spanned by the tangential parts of x and y (contravariant components).
/// Throws PreconditionError for a degenerate plane.
FiberCurvature fiber_sectional_curvature(const PointGeometry& geo, const LevelSetFrame& frame,
                                         const PotentialSpec& pot, std::span<const double> x,
                                         std::span<const double> y);
FiberCurvature fiber_sectional_curvature(const MetricSpec& chart, const PotentialSpec& pot,
                                         std::span<const double> point, std::span<const double> x,
                                         std::span<const double> y);

/// Tangential parts of Ric(n, .), grad R and grad |grad f|^2, each scaled.
Defects tangential_defects(const PointGeometry& geo, const LevelSetFrame& frame);

/// Points must share one level of f (within 1e-9); PreconditionError otherwise.
CheckReport check_level_set_constancy(const MetricSpec& chart, const PotentialSpec& pot,
                                      const std::vector<Point>& points,
                                      double tol_multiplier = 1.0);

/// A chart whose first coordinate is f, with g_0j = 0.
struct AdaptedChartSpec {
  MetricSpec metric;
  PotentialSpec potential;
};

/// Verifies f = x^0 and g_0j = 0 at sampled domain points; PreconditionError otherwise.
AdaptedChartSpec make_adapted_chart(MetricSpec metric, PotentialSpec potential,
                                    std::uint64_t seed = 0);

/// The six coordinate identities, with N = |grad f|^2 = g^00, d_0 f = 1,
/// nabla the covariant derivative of coordinate components and i, j >= 1:
///   id1             nabla_j N = -2 N R_0j
///   id1_radial      nabla_0 N = -2 N R_00 + 2 mu N + 2 lambda
///   id2             nabla_j R = 2 (1 - mu) N R_0j
///   id2_radial      nabla_0 R = 2 (1 - mu) N R_00 - 2 (n-1) mu lambda + 2 mu R
///   id3             nabla_0 R_j0 - nabla_j R_00 = mu R_0j
///   id3_tangential  nabla_0 R_ij - nabla_j R_i0 = (mu (n-2) + 1)/(n-2) R_ij + N R_00 g_ij/(n-2)
///                                                 - R g_ij/((n-1)(n-2)) - lambda mu g_ij
/// The last needs W = 0 and is asserted only when the LCF gate passes at every
/// point; otherwise it is reported.
CheckReport check_adapted_identities(const AdaptedChartSpec& chart,
                                     const std::vector<Point>& points,
                                     double tol_multiplier = 1.0);

/// C_0j0 = (mu (n-2) + 1)/(n-1) R_0j and
/// C_ij0 = (mu (n-2) + 1)/(n-2) (h_ij - H/(n-1) g_ij) |grad f|
/// (keys cotton_0j0, cotton_ij0); the second is asserted under the LCF gate.
CheckReport cotton_component_checks(const AdaptedChartSpec& chart,
                                    const std::vector<Point>& points,
                                    double tol_multiplier = 1.0);

/// The two Cotton right-hand sides at one point, for inspection.
struct CottonDisplays {
  TensorValue c0j0_lhs, c0j0_rhs;  // index j
  TensorValue cij0_lhs, cij0_rhs;  // indices (i, j)
};
CottonDisplays cotton_displays(const PointGeometry& geo, const PotentialSpec& pot);

struct LevelSample {
  double level = 0.0;
  std::vector<Point> points;
};

struct SamplePlan {
  std::vector<LevelSample> levels;
  int planes_per_point = 3;
  std::uint64_t seed = 0;
};

/// Aggregated evidence for the warped-product conclusion. Throws
/// PreconditionError for mu = 1/(2-n), which belongs to the conformal check.
CheckReport theorem_verdict(const MetricSpec& chart, const PotentialSpec& pot,
                            const SamplePlan& plan, double tol_multiplier = 1.0);

}  // namespace qeflat
