#include "qeflat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace qeflat {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotApplicable: return "NOT-APPLICABLE";
  }
  return "?";
}

std::string spread_key(const std::string& name) { return "spread(" + name + ")"; }

void CheckReport::add_point(std::vector<double> coords, const Defects& defects) {
  for (const auto& [name, value] : defects) merge_max(name, value);
  points.push_back({std::move(coords), defects});
}

void CheckReport::merge_max(const std::string& name, double value) {
  auto [it, inserted] = aggregate.emplace(name, value);
  if (!inserted && (std::isnan(value) || value > it->second)) it->second = value;
}

void CheckReport::add_spread(const std::string& name, const std::vector<double>& values) {
  if (values.empty()) return;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  merge_max(spread_key(name), (*hi - *lo) / scale);
}

void CheckReport::require(const std::string& name, double tolerance) {
  tolerances[name] = tolerance;
}

void CheckReport::add_gate(const std::string& name, double value, double tolerance) {
  for (auto& g : gates) {
    if (g.name == name) {
      g.value = std::max(g.value, value);
      g.passed = g.value <= g.tolerance;
      return;
    }
  }
  gates.push_back({name, value, tolerance, value <= tolerance});
}

bool CheckReport::gates_passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
}

void CheckReport::absorb(const CheckReport& other) {
  for (const auto& p : other.points) points.push_back(p);
  for (const auto& [k, v] : other.aggregate) merge_max(k, v);
  for (const auto& [k, v] : other.tolerances) tolerances[k] = v;
  for (const auto& g : other.gates) add_gate(g.name, g.value, g.tolerance);
}

double CheckReport::value(const std::string& name) const {
  const auto it = aggregate.find(name);
  return it == aggregate.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

void CheckReport::finalize() {
  reason.clear();
  for (const auto& g : gates) {
    if (!g.passed) {
      verdict = Verdict::NotApplicable;
      std::ostringstream msg;
      msg << "gate '" << g.name << "' failed (" << round_significant(g.value) << " > "
          << round_significant(g.tolerance) << ")";
      reason = msg.str();
      return;
    }
  }
  for (const auto& [name, tol] : tolerances) {
    const double v = value(name);
    if (!(v <= tol)) {
      verdict = Verdict::Fail;
      std::ostringstream msg;
      msg << "'" << name << "' = " << round_significant(v) << " exceeds "
          << round_significant(tol);
      reason = msg.str();
      return;
    }
  }
  verdict = Verdict::Pass;
}

double round_significant(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_significant(x);
}

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["source"] = r.source;
  j["seed"] = r.seed;
  nlohmann::json tol;
  tol["multiplier"] = number(r.tol_multiplier);
  tol["thresholds"] = nlohmann::json::object();
  for (const auto& [k, v] : r.tolerances) tol["thresholds"][k] = number(v);
  j["tol"] = tol;
  j["points"] = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json pj;
    pj["coords"] = nlohmann::json::array();
    for (double c : p.coords) pj["coords"].push_back(number(c));
    pj["defects"] = nlohmann::json::object();
    for (const auto& [k, v] : p.defects) pj["defects"][k] = number(v);
    j["points"].push_back(pj);
  }
  j["aggregate"] = nlohmann::json::object();
  for (const auto& [k, v] : r.aggregate) j["aggregate"][k] = number(v);
  j["gates"] = nlohmann::json::array();
  for (const auto& g : r.gates) {
    j["gates"].push_back({{"name", g.name},
                          {"value", number(g.value)},
                          {"tolerance", number(g.tolerance)},
                          {"status", g.passed ? "PASS" : "FAIL"}});
  }
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  return j;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

}  // namespace

std::string render_json(const CheckReport& report) { return to_json(report).dump(2) + "\n"; }

std::string render_json(const std::vector<CheckReport>& reports) {
  if (reports.size() == 1) return render_json(reports.front());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

std::string render_text(const CheckReport& r) {
  std::ostringstream out;
  out << "check:   " << r.check << "\n";
  out << "source:  " << r.source << "\n";
  out << "seed:    " << r.seed << "   points: " << r.points.size()
      << "   tol multiplier: " << r.tol_multiplier << "\n";

  std::size_t width = 4;
  for (const auto& [k, v] : r.aggregate) width = std::max(width, k.size());
  for (const auto& g : r.gates) width = std::max(width, g.name.size());

  if (!r.gates.empty()) {
    out << "\n" << std::left << std::setw(static_cast<int>(width) + 2) << "gate" << std::setw(16)
        << "value" << std::setw(16) << "tolerance" << "status\n";
    for (const auto& g : r.gates) {
      out << std::left << std::setw(static_cast<int>(width) + 2) << g.name << std::setw(16)
          << fmt(g.value) << std::setw(16) << fmt(g.tolerance) << (g.passed ? "PASS" : "FAIL")
          << "\n";
    }
  }
  out << "\n" << std::left << std::setw(static_cast<int>(width) + 2) << "defect" << std::setw(16)
      << "max" << std::setw(16) << "tolerance" << "status\n";
  for (const auto& [k, v] : r.aggregate) {
    const auto t = r.tolerances.find(k);
    out << std::left << std::setw(static_cast<int>(width) + 2) << k << std::setw(16) << fmt(v);
    if (t == r.tolerances.end()) {
      out << std::setw(16) << "-" << "info\n";
    } else {
      out << std::setw(16) << fmt(t->second) << (v <= t->second ? "ok" : "EXCEEDED") << "\n";
    }
  }
  out << "\nverdict: " << to_string(r.verdict);
  if (!r.reason.empty()) out << "  (" << r.reason << ")";
  out << "\n";
  return out.str();
}

std::string report_render(const CheckReport& report, bool json) {
  return json ? render_json(report) : render_text(report);
}

}  // namespace qeflat
