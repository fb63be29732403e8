#pragma once

// CheckReport: the result of every verification operation, and its
// deterministic text and JSON renderings.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qeflat {

enum class Verdict { Pass, Fail, NotApplicable };

std::string to_string(Verdict v);

/// A precondition check. A failed gate makes the verdict NOT-APPLICABLE.
struct Gate {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

using Defects = std::vector<std::pair<std::string, double>>;

struct PointRecord {
  std::vector<double> coords;
  Defects defects;
};

class CheckReport {
 public:
  CheckReport() = default;
  explicit CheckReport(std::string check) : check(std::move(check)) {}

  std::string check;
  std::string source;
  std::uint64_t seed = 0;
  double tol_multiplier = 1.0;
  std::vector<PointRecord> points;
  /// Max defect per name over all points, plus spreads ("spread(name)").
  std::map<std::string, double> aggregate;
  /// Aggregate keys that are asserted, with their thresholds.
  std::map<std::string, double> tolerances;
  std::vector<Gate> gates;
  Verdict verdict = Verdict::Pass;
  std::string reason;

  /// Records a point and folds its defects into the aggregate maxima.
  void add_point(std::vector<double> coords, const Defects& defects);
  /// Folds a value into aggregate[name] as a running maximum.
  void merge_max(const std::string& name, double value);
  /// Records max - min of `values` as spread(name), keeping the largest spread seen.
  void add_spread(const std::string& name, const std::vector<double>& values);
  /// Asserts aggregate[name] <= tolerance (already scaled by the multiplier).
  void require(const std::string& name, double tolerance);
  void add_gate(const std::string& name, double value, double tolerance);
  bool gates_passed() const;
  /// Pulls every point, aggregate, tolerance and gate of `other` into this report.
  void absorb(const CheckReport& other);

  /// Computes the verdict: NOT-APPLICABLE if a gate failed, else PASS iff every
  /// asserted aggregate is within its tolerance.
  void finalize();
  bool passed() const { return verdict == Verdict::Pass; }
  double value(const std::string& name) const;
};

std::string spread_key(const std::string& name);

/// Rounds to 12 significant digits, the precision used in rendered reports.
double round_significant(double x);

std::string render_json(const CheckReport& report);
std::string render_json(const std::vector<CheckReport>& reports);
std::string render_text(const CheckReport& report);
std::string report_render(const CheckReport& report, bool json);

}  // namespace qeflat
