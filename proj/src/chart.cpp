#include "qeflat/chart.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qeflat/errors.hpp"

namespace qeflat {

MetricSpec::MetricSpec(std::string name, std::vector<std::string> coordinates,
                       std::vector<Interval> domain, const ComponentMap& components)
    : name_(std::move(name)), coordinates_(std::move(coordinates)), domain_(std::move(domain)) {
  const int n = dimension();
  if (n < 2 || n > kMaxJetDimension) {
    throw std::invalid_argument("chart dimension must lie in [2, " +
                                std::to_string(kMaxJetDimension) + "]");
  }
  if (static_cast<int>(domain_.size()) != n) {
    throw std::invalid_argument("domain box must have one interval per coordinate");
  }
  for (const auto& iv : domain_) {
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("domain interval has lo > hi");
  }
  const Expression zero = Expression::literal(0.0, coordinates_);
  components_.assign(static_cast<std::size_t>(n) * n, zero);
  zero_.assign(static_cast<std::size_t>(n) * n, true);
  for (const auto& [key, expr] : components) {
    const auto [a, b] = key;
    if (a < 0 || b < 0 || a >= n || b >= n || a > b) {
      throw std::invalid_argument("metric component keys must satisfy 0 <= a <= b < dim");
    }
    if (expr.coordinates() != coordinates_) {
      throw std::invalid_argument("metric component uses a different coordinate list");
    }
    components_[a * n + b] = expr;
    components_[b * n + a] = expr;
    zero_[a * n + b] = zero_[b * n + a] = false;
  }
}

MetricSpec MetricSpec::from_text(std::string name, std::vector<std::string> coordinates,
                                 std::vector<Interval> domain,
                                 const std::map<std::pair<int, int>, std::string>& components) {
  ComponentMap parsed;
  for (const auto& [key, text] : components) parsed[key] = parse(text, coordinates);
  return MetricSpec(std::move(name), std::move(coordinates), std::move(domain), parsed);
}

const Expression& MetricSpec::component(int a, int b) const {
  const int n = dimension();
  if (a < 0 || b < 0 || a >= n || b >= n) throw std::out_of_range("metric index out of range");
  return components_[a * n + b];
}

bool MetricSpec::is_zero_component(int a, int b) const {
  const int n = dimension();
  return zero_.at(static_cast<std::size_t>(a) * n + b);
}

TensorValue MetricSpec::metric_values(std::span<const double> point) const {
  const int n = dimension();
  TensorValue g(n, downs(2), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double v = is_zero_component(a, b) ? 0.0 : evaluate(component(a, b), point);
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

TensorJet MetricSpec::metric_jets(std::span<const double> point) const {
  const int n = dimension();
  if (static_cast<int>(point.size()) != n) {
    throw std::invalid_argument("point dimension does not match chart");
  }
  const auto seeds = seed(point, n);
  TensorJet g(n, downs(2), Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      if (is_zero_component(a, b)) continue;
      Jet3 v = evaluate(component(a, b), std::span<const Jet3>(seeds));
      g(a, b) = v;
      g(b, a) = std::move(v);
    }
  }
  return g;
}

bool PotentialSpec::is_special_mu(int n, double tol) const {
  return std::abs(mu - 1.0 / (2.0 - n)) <= tol;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<Point> sample_points(std::span<const Interval> box, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Point> points;
  points.reserve(count);
  for (int k = 0; k < count; ++k) {
    Point p;
    for (const auto& iv : box) p.push_back(rng.uniform(iv.lo, iv.hi));
    points.push_back(std::move(p));
  }
  return points;
}

MetricFileError::MetricFileError(const std::string& source, int line, int column,
                                 const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 0-based
};

std::vector<Token> split(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start});
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  const auto res = std::from_chars(begin, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MetricFile parse_metric_file(std::string_view text, const std::string& source_name) {
  int dim = -1;
  std::vector<std::string> coords;
  std::map<std::string, Interval> domain;
  MetricSpec::ComponentMap components;
  std::optional<Expression> f;
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<int> potential_line;
  bool adapted = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tokens = split(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fail = [&](std::size_t column, const std::string& msg) -> MetricFileError {
      return MetricFileError(source_name, line_no, static_cast<int>(column) + 1, msg);
    };
    auto rest_from = [&](std::size_t k) {
      return std::string(line.substr(tokens[k].column));
    };
    const std::string_view key = tokens[0].text;

    if (key == "dim") {
      if (tokens.size() != 2) throw fail(tokens[0].column, "expected 'dim <integer>'");
      int v = 0;
      const auto t = tokens[1].text;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v < 2 ||
          v > kMaxJetDimension) {
        throw fail(tokens[1].column,
                   "dimension must be an integer in [2, " + std::to_string(kMaxJetDimension) + "]");
      }
      dim = v;
    } else if (key == "coords") {
      if (dim < 0) throw fail(tokens[0].column, "'dim' must come before 'coords'");
      if (static_cast<int>(tokens.size()) - 1 != dim) {
        throw fail(tokens[0].column, "expected " + std::to_string(dim) + " coordinate names");
      }
      coords.clear();
      for (std::size_t k = 1; k < tokens.size(); ++k) coords.emplace_back(tokens[k].text);
      try {
        parse("0", coords);
      } catch (const ParseError& e) {
        throw fail(tokens[1].column, e.what());
      }
    } else if (key == "domain") {
      if (coords.empty()) throw fail(tokens[0].column, "'coords' must come before 'domain'");
      if (tokens.size() != 4) throw fail(tokens[0].column, "expected 'domain <coord> <lo> <hi>'");
      const std::string name(tokens[1].text);
      if (std::find(coords.begin(), coords.end(), name) == coords.end()) {
        throw fail(tokens[1].column, "unknown coordinate '" + name + "'");
      }
      const auto lo = to_double(tokens[2].text);
      const auto hi = to_double(tokens[3].text);
      if (!lo) throw fail(tokens[2].column, "expected a number");
      if (!hi) throw fail(tokens[3].column, "expected a number");
      if (!(*lo <= *hi)) throw fail(tokens[2].column, "domain lower bound exceeds upper bound");
      domain[name] = {*lo, *hi};
    } else if (key == "metric") {
      if (coords.empty()) throw fail(tokens[0].column, "'coords' must come before 'metric'");
      if (tokens.size() < 3) throw fail(tokens[0].column, "expected 'metric <ab> <expression>'");
      const auto idx = tokens[1].text;
      if (idx.size() != 2 || !std::isdigit(static_cast<unsigned char>(idx[0])) ||
          !std::isdigit(static_cast<unsigned char>(idx[1]))) {
        throw fail(tokens[1].column, "component key must be two digits 'ab'");
      }
      const int a = idx[0] - '0';
      const int b = idx[1] - '0';
      if (a > b) throw fail(tokens[1].column, "component key must have a <= b");
      if (b >= dim) throw fail(tokens[1].column, "component index exceeds dimension");
      if (components.count({a, b})) throw fail(tokens[1].column, "duplicate component");
      try {
        components[{a, b}] = parse(rest_from(2), coords);
      } catch (const ParseError& e) {
        throw fail(tokens[2].column + e.position(), e.what());
      }
    } else if (key == "potential") {
      if (tokens.size() < 3) throw fail(tokens[0].column, "expected 'potential <f|mu|lambda> <value>'");
      potential_line = line_no;
      const auto which = tokens[1].text;
      if (which == "f") {
        if (coords.empty()) throw fail(tokens[0].column, "'coords' must come before 'potential f'");
        try {
          f = parse(rest_from(2), coords);
        } catch (const ParseError& e) {
          throw fail(tokens[2].column + e.position(), e.what());
        }
      } else if (which == "mu" || which == "lambda") {
        if (tokens.size() != 3) throw fail(tokens[2].column, "expected a single number");
        const auto v = to_double(tokens[2].text);
        if (!v) throw fail(tokens[2].column, "expected a number");
        (which == "mu" ? mu : lambda) = *v;
      } else {
        throw fail(tokens[1].column, "unknown potential field '" + std::string(which) + "'");
      }
    } else if (key == "adapted") {
      if (tokens.size() != 2 || (tokens[1].text != "true" && tokens[1].text != "false")) {
        throw fail(tokens[0].column, "expected 'adapted true|false'");
      }
      adapted = tokens[1].text == "true";
    } else {
      throw fail(tokens[0].column, "unknown section '" + std::string(key) + "'");
    }
    if (end == text.size()) break;
  }

  if (dim < 0) throw MetricFileError(source_name, line_no, 1, "missing 'dim'");
  if (coords.empty()) throw MetricFileError(source_name, line_no, 1, "missing 'coords'");
  std::vector<Interval> box;
  for (const auto& c : coords) {
    const auto it = domain.find(c);
    if (it == domain.end()) {
      throw MetricFileError(source_name, line_no, 1, "missing 'domain' for coordinate '" + c + "'");
    }
    box.push_back(it->second);
  }
  if (components.empty()) throw MetricFileError(source_name, line_no, 1, "no metric components");

  MetricFile out{MetricSpec(source_name, coords, box, components), std::nullopt, adapted};
  if (potential_line) {
    if (!f || !mu || !lambda) {
      throw MetricFileError(source_name, *potential_line, 1,
                            "potential needs all of 'f', 'mu' and 'lambda'");
    }
    out.potential = PotentialSpec{*f, *mu, *lambda};
  }
  if (adapted && !out.potential) {
    throw MetricFileError(source_name, line_no, 1, "'adapted true' requires a potential");
  }
  return out;
}

MetricFile load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MetricFileError(path, 0, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_metric_file(buf.str(), path);
}

std::string write_metric_file(const MetricFile& file) {
  const auto& m = file.metric;
  std::ostringstream out;
  out << "dim " << m.dimension() << "\n";
  out << "coords";
  for (const auto& c : m.coordinates()) out << " " << c;
  out << "\n";
  for (int i = 0; i < m.dimension(); ++i) {
    out << "domain " << m.coordinates()[i] << " " << format_number(m.domain()[i].lo) << " "
        << format_number(m.domain()[i].hi) << "\n";
  }
  for (int a = 0; a < m.dimension(); ++a) {
    for (int b = a; b < m.dimension(); ++b) {
      if (m.is_zero_component(a, b)) continue;
      out << "metric " << a << b << " " << m.component(a, b).to_string() << "\n";
    }
  }
  if (file.potential) {
    out << "potential f " << file.potential->f.to_string() << "\n";
    out << "potential mu " << format_number(file.potential->mu) << "\n";
    out << "potential lambda " << format_number(file.potential->lambda) << "\n";
  }
  if (file.adapted) out << "adapted true\n";
  return out.str();
}

}  // namespace qeflat
