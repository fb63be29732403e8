#pragma once

// Metric -> Christoffel -> Riemann -> Ricci -> scalar -> Weyl -> Cotton at a
// point, via jets of the metric components.
//
// Sign convention: Riem(X,Y)Z = nabla_Y nabla_X Z - nabla_X nabla_Y Z + nabla_[X,Y] Z,
// with R^d_{abc} d_d = Riem(d_a, d_b) d_c and R_{abcd} = g_{de} R^e_{abc}. Under this
// convention R_{abab} > 0 on the round sphere, R_{ac} = g^{bd} R_{abcd}, and
//   R^d_{abc} = d_b Gamma^d_{ac} - d_a Gamma^d_{bc}
//             + Gamma^e_{ac} Gamma^d_{be} - Gamma^e_{bc} Gamma^d_{ae}.

#include <optional>
#include <span>

#include "qeflat/chart.hpp"
#include "qeflat/report.hpp"
#include "qeflat/tensor.hpp"

namespace qeflat {

/// Jet-valued curvature, each object one order shallower than its source.
struct CurvatureJets {
  TensorJet g;            // order 3
  TensorJet g_inv;        // order 3
  TensorJet christoffel;  // Gamma^a_{bc}, order 2
  TensorJet riemann;      // R_{abcd}, order 1
  TensorJet ricci;        // R_{ab}, order 1
  Jet3 scalar;            // R, order 1
};

CurvatureJets curvature_jets(const MetricSpec& chart, std::span<const double> point);

/// W_{abcd} as jets (order 1); n >= 4.
TensorJet weyl_jets(const CurvatureJets& c);

struct CurvaturePack {
  Point point;
  MetricAtPoint metric;
  TensorValue christoffel;      // Gamma^a_{bc}
  TensorValue riemann;          // R_{abcd}
  TensorValue ricci;            // R_{ab}
  double scalar = 0.0;          // R
  std::optional<TensorValue> weyl;  // n >= 4 only
  TensorValue ricci_gradient;   // (nabla Ric)_{abc} = nabla_c R_{ab}
  TensorValue scalar_gradient;  // nabla_c R
  TensorValue cotton;           // C_{abc}
};

CurvaturePack curvature_pack(const MetricSpec& chart, std::span<const double> point);
CurvaturePack curvature_pack(const CurvatureJets& jets, std::span<const double> point);

TensorValue christoffel(const MetricSpec& chart, std::span<const double> point);
TensorValue riemann(const MetricSpec& chart, std::span<const double> point);
std::pair<TensorValue, double> ricci_scalar(const MetricSpec& chart, std::span<const double> point);
/// Throws std::invalid_argument for n = 3, where the Weyl tensor vanishes
/// identically and conformal flatness is governed by the Cotton tensor.
TensorValue weyl(const MetricSpec& chart, std::span<const double> point);
TensorValue cotton(const MetricSpec& chart, std::span<const double> point);

/// Weyl tensor from Riemann, Ricci, scalar curvature and the metric.
TensorValue weyl_from(const TensorValue& riemann, const TensorValue& ricci, double scalar,
                      const TensorValue& g);
/// C_{abc} = nabla_c R_ab - nabla_b R_ac - (nabla_c R g_ab - nabla_b R g_ac) / (2(n-1)).
TensorValue cotton_from(const TensorValue& ricci_gradient, const TensorValue& scalar_gradient,
                        const TensorValue& g);

/// Pointwise norm |T| = sqrt(T_{a...} T^{a...}) of a fully covariant tensor.
double tensor_norm(const TensorValue& t, const MetricAtPoint& m);

/// Difference divided by max(1, scale).
inline double scaled(double difference, double scale) {
  return difference / (scale > 1.0 ? scale : 1.0);
}

/// Universal curvature identities at one point: Christoffel symmetry, Riemann
/// symmetries, first Bianchi, Ricci symmetry, contracted Bianchi (Schur),
/// Weyl trace-freeness, Cotton symmetries. All defects are scaled.
Defects curvature_identity_defects(const CurvaturePack& pack);

/// Invariant curvature norms (informational): |Riem|, |Ric|, R, |W|, |C|.
Defects curvature_norms(const CurvaturePack& pack);

/// Conformal-flatness defects: scaled |W| for n >= 4 (key "weyl_defect") and
/// scaled |C| (key "cotton_defect").
Defects lcf_defects(const CurvaturePack& pack);

/// Scaled |nabla^d W_{dabc} + (n-3)/(n-2) C_{abc}|_inf. The divergence is taken on
/// the first slot; on the last slot the same relation reads +(n-3)/(n-2) C_{cab}.
double weyl_divergence_defect(const CurvatureJets& jets);

/// Single-point report of the Weyl-divergence relation; n >= 4.
CheckReport check_weyl_divergence(const MetricSpec& chart, std::span<const double> point,
                                  double tolerance = 1e-6);

}  // namespace qeflat
