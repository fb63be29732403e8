#pragma once

// Charts: metric component expressions over named coordinates with a
// sampling box, the quasi-Einstein potential data, reproducible sampling and
// the plain-text metric file format.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qeflat/expr.hpp"
#include "qeflat/tensor.hpp"

namespace qeflat {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class MetricSpec {
 public:
  using ComponentMap = std::map<std::pair<int, int>, Expression>;

  MetricSpec() = default;
  /// `components` is keyed by (a, b) with a <= b; missing entries are zero.
  MetricSpec(std::string name, std::vector<std::string> coordinates, std::vector<Interval> domain,
             const ComponentMap& components);
  /// Same, with components given as source text.
  static MetricSpec from_text(std::string name, std::vector<std::string> coordinates,
                              std::vector<Interval> domain,
                              const std::map<std::pair<int, int>, std::string>& components);

  const std::string& name() const { return name_; }
  int dimension() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const Expression& component(int a, int b) const;
  bool is_zero_component(int a, int b) const;

  TensorValue metric_values(std::span<const double> point) const;
  TensorJet metric_jets(std::span<const double> point) const;

 private:
  std::string name_;
  std::vector<std::string> coordinates_;
  std::vector<Interval> domain_;
  std::vector<Expression> components_;  // n*n, symmetric
  std::vector<bool> zero_;
};

/// Quasi-Einstein data: Ric + Hess f - mu df (x) df = lambda g.
struct PotentialSpec {
  Expression f;
  double mu = 0.0;
  double lambda = 0.0;

  /// mu == 1/(2-n): the conformally Einstein case.
  bool is_special_mu(int n, double tol = 1e-12) const;
};

/// 64-bit splitmix generator; identical streams on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// `count` points drawn uniformly from the box, in draw order.
std::vector<Point> sample_points(std::span<const Interval> box, int count, std::uint64_t seed);

class MetricFileError : public std::runtime_error {
 public:
  MetricFileError(const std::string& source, int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct MetricFile {
  MetricSpec metric;
  std::optional<PotentialSpec> potential;
  bool adapted = false;
};

MetricFile parse_metric_file(std::string_view text, const std::string& source_name);
MetricFile load_metric_file(const std::string& path);
std::string write_metric_file(const MetricFile& file);

}  // namespace qeflat
