#pragma once

// Warped products dt^2 + phi(t)^2 g_k over constant-curvature fibers, and the
// catalog of exact fixtures.
//
// Fiber charts in coordinates w1..wm (m = n - 1):
//   k =  0   sum dwi^2
//   k = +1   dw1^2 + sin(w1)^2 dw2^2 + sin(w1)^2 sin(w2)^2 dw3^2 + ...,  wi in [0.2, pi - 0.2]
//   k = -1   dw1^2 + exp(2 w1) (dw2^2 + ... + dwm^2)

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qeflat/adapted.hpp"
#include "qeflat/chart.hpp"
#include "qeflat/report.hpp"

namespace qeflat {

struct WarpSpec {
  int n = 3;
  std::string phi = "1";  // expression in t
  int k = 0;
  Interval t_domain{-1.0, 1.0};
  std::string name;  // defaults to a description of the spec
};

/// Throws std::invalid_argument for bad parameters and PreconditionError when
/// phi <= 0 at a sampled t.
MetricSpec build_warped_chart(const WarpSpec& spec);

/// Cotton defect for n = 3, Weyl defect for n >= 4, asserted below 1e-7.
CheckReport check_warped_lcf(const WarpSpec& spec, const std::vector<Point>& points,
                             double tol_multiplier = 1.0);
CheckReport check_lcf(const MetricSpec& chart, const std::vector<Point>& points,
                      double tol_multiplier = 1.0);

inline constexpr double kWarpedLcfTolerance = 1e-7;

/// Points of one level set of f, drawn deterministically.
using LevelSampler = std::function<std::vector<Point>(double level, int count, std::uint64_t seed)>;

struct Fixture {
  std::string name;  // canonical, with arguments
  std::string description;
  MetricSpec metric;
  std::optional<PotentialSpec> potential;
  bool adapted = false;
  std::vector<double> default_levels;
  LevelSampler level_sampler;
};

/// Looks up "name" or "name:arg:arg". Throws std::invalid_argument for unknown
/// names and invalid parameters.
Fixture catalog(const std::string& spec);

struct CatalogEntry {
  std::string usage;  // e.g. "hyperbolic_qe:n:mu"
  std::string description;
};
std::vector<CatalogEntry> catalog_names();

/// Level sets of a chart whose first coordinate is f: x^0 fixed, the rest
/// uniform over the domain box.
LevelSampler adapted_level_sampler(const MetricSpec& chart);

/// Sample plan over the given levels; level i is drawn with seed + i.
SamplePlan make_sample_plan(const LevelSampler& sampler, const std::vector<double>& levels,
                            int points_per_level, int planes_per_point, std::uint64_t seed);

}  // namespace qeflat
