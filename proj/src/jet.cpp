#include "qeflat/jet.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "qeflat/errors.hpp"

namespace qeflat {

namespace {

std::size_t encode(const MultiIndex& alpha, int n) {
  std::size_t code = 0;
  for (int i = n - 1; i >= 0; --i) code = code * 4 + alpha[i];
  return code;
}

int total_degree(const MultiIndex& alpha) {
  int d = 0;
  for (auto a : alpha) d += a;
  return d;
}

void enumerate(int n, int var, int remaining, MultiIndex& current,
               std::vector<MultiIndex>& out) {
  if (var == n) {
    out.push_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[var] = static_cast<std::uint8_t>(k);
    enumerate(n, var + 1, remaining - k, current, out);
  }
  current[var] = 0;
}

}  // namespace

JetLayout::JetLayout(int n) : n_(n) {
  MultiIndex zero{};
  enumerate(n, 0, kJetOrder, zero, indices_);
  std::stable_sort(indices_.begin(), indices_.end(), [](const auto& a, const auto& b) {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  });
  degree_.reserve(indices_.size());
  for (const auto& a : indices_) degree_.push_back(total_degree(a));
  for (int o = 0; o <= kJetOrder; ++o) {
    prefix_[o] = static_cast<std::size_t>(
        std::count_if(degree_.begin(), degree_.end(), [o](int d) { return d <= o; }));
  }

  std::size_t codes = 1;
  for (int i = 0; i < n; ++i) codes *= 4;
  lookup_.assign(codes, -1);
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    lookup_[encode(indices_[k], n)] = static_cast<std::int32_t>(k);
  }

  for (int out_degree = 0; out_degree <= kJetOrder; ++out_degree) {
    for (std::size_t a = 0; a < indices_.size(); ++a) {
      for (std::size_t b = 0; b < indices_.size(); ++b) {
        if (degree_[a] + degree_[b] != out_degree) continue;
        MultiIndex sum{};
        for (int i = 0; i < n; ++i) {
          sum[i] = static_cast<std::uint8_t>(indices_[a][i] + indices_[b][i]);
        }
        products_.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                             static_cast<std::uint16_t>(index_of(sum))});
      }
    }
    product_prefix_[out_degree] = products_.size();
  }

  derivative_.resize(n);
  for (int d = 0; d < n; ++d) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      const auto& alpha = indices_[k];
      if (alpha[d] == 0) continue;
      MultiIndex lowered = alpha;
      lowered[d] -= 1;
      derivative_[d].push_back({static_cast<std::uint16_t>(k),
                                static_cast<std::uint16_t>(index_of(lowered)),
                                static_cast<double>(alpha[d])});
    }
  }
}

const JetLayout& JetLayout::get(int n) {
  if (n < 1 || n > kMaxJetDimension) {
    throw JetDimensionError("jet dimension must lie in [1, " +
                            std::to_string(kMaxJetDimension) + "], got " +
                            std::to_string(n));
  }
  static std::array<std::unique_ptr<JetLayout>, kMaxJetDimension + 1> layouts;
  static std::array<std::once_flag, kMaxJetDimension + 1> flags;
  std::call_once(flags[n], [n] { layouts[n].reset(new JetLayout(n)); });
  return *layouts[n];
}

std::size_t JetLayout::index_of(const MultiIndex& alpha) const {
  if (total_degree(alpha) > kJetOrder) {
    throw std::out_of_range("multi-index exceeds jet order 3");
  }
  for (int i = n_; i < kMaxJetDimension; ++i) {
    if (alpha[i] != 0) throw std::out_of_range("multi-index exceeds jet dimension");
  }
  return static_cast<std::size_t>(lookup_[encode(alpha, n_)]);
}

Jet3::Jet3(int n, double c) : layout_(&JetLayout::get(n)), coeffs_(layout_->size(), 0.0) {
  coeffs_[0] = c;
}

Jet3 Jet3::variable(int n, int i, double v) {
  if (i < 0 || i >= n) throw std::out_of_range("variable index out of range");
  Jet3 j(n, v);
  MultiIndex e{};
  e[i] = 1;
  j.coeffs_[j.layout_->index_of(e)] = 1.0;
  return j;
}

double Jet3::coefficient(const MultiIndex& alpha) const {
  const std::size_t k = layout_->index_of(alpha);
  if (layout_->degree(k) > order_) {
    throw std::logic_error("requested coefficient beyond the jet's exact order");
  }
  return coeffs_[k];
}

double Jet3::partial(const MultiIndex& alpha) const {
  return factorial(alpha) * coefficient(alpha);
}

double Jet3::partial(std::initializer_list<int> directions) const {
  return partial(multi_index(directions));
}

Jet3 Jet3::derivative(int direction) const {
  if (order_ < 1) {
    throw std::logic_error("insufficient jet order for a further derivative");
  }
  if (direction < 0 || direction >= dimension()) {
    throw std::out_of_range("derivative direction out of range");
  }
  Jet3 out(dimension(), 0.0);
  out.order_ = order_ - 1;
  const std::size_t limit = layout_->count_up_to(order_);
  for (const auto& t : layout_->derivative_terms(direction)) {
    if (t.src < limit) out.coeffs_[t.dst] += t.factor * coeffs_[t.src];
  }
  return out;
}

Jet3 Jet3::truncated(int order) const {
  Jet3 out = *this;
  out.order_ = std::min(order_, std::max(order, 0));
  for (std::size_t k = layout_->count_up_to(out.order_); k < coeffs_.size(); ++k) {
    out.coeffs_[k] = 0.0;
  }
  return out;
}

void Jet3::require_same_dimension(const Jet3& other) const {
  if (layout_ != other.layout_) {
    throw JetDimensionError("jet dimension mismatch: " + std::to_string(dimension()) +
                            " vs " + std::to_string(other.dimension()));
  }
}

Jet3& Jet3::operator+=(const Jet3& rhs) {
  require_same_dimension(rhs);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  if (rhs.order_ < order_) *this = truncated(rhs.order_);
  return *this;
}

Jet3& Jet3::operator-=(const Jet3& rhs) {
  require_same_dimension(rhs);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  if (rhs.order_ < order_) *this = truncated(rhs.order_);
  return *this;
}

Jet3& Jet3::operator*=(const Jet3& rhs) {
  *this = *this * rhs;
  return *this;
}

Jet3& Jet3::operator/=(const Jet3& rhs) {
  *this = *this / rhs;
  return *this;
}

Jet3& Jet3::operator+=(double c) {
  coeffs_[0] += c;
  return *this;
}

Jet3& Jet3::operator-=(double c) {
  coeffs_[0] -= c;
  return *this;
}

Jet3& Jet3::operator*=(double c) {
  for (auto& x : coeffs_) x *= c;
  return *this;
}

Jet3& Jet3::operator/=(double c) {
  if (c == 0.0) throw DomainError("division of a jet by zero");
  for (auto& x : coeffs_) x /= c;
  return *this;
}

Jet3 Jet3::operator-() const {
  Jet3 out = *this;
  for (auto& x : out.coeffs_) x = -x;
  return out;
}

Jet3 Jet3::compose(const std::array<double, 4>& d) const {
  // f(a + v) = f(a) + f'(a) v + f''(a) v^2 / 2 + f'''(a) v^3 / 6, with v(0) = 0.
  Jet3 v = *this;
  v.coeffs_[0] = 0.0;
  Jet3 out(dimension(), d[0]);
  out.order_ = order_;
  if (order_ == 0) return out;
  Jet3 power = v;
  out += d[1] * power;
  if (order_ >= 2) {
    power = power * v;
    out += (d[2] / 2.0) * power;
  }
  if (order_ >= 3) {
    power = power * v;
    out += (d[3] / 6.0) * power;
  }
  return out;
}

Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }

Jet3 operator*(const Jet3& a, const Jet3& b) {
  a.require_same_dimension(b);
  Jet3 out(a.dimension(), 0.0);
  out.order_ = std::min(a.order_, b.order_);
  out.coeffs_[0] = 0.0;
  for (const auto& t : a.layout_->products(out.order_)) {
    out.coeffs_[t.out] += a.coeffs_[t.lhs] * b.coeffs_[t.rhs];
  }
  return out;
}

Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }
Jet3 operator+(Jet3 a, double c) { return a += c; }
Jet3 operator+(double c, Jet3 a) { return a += c; }
Jet3 operator-(Jet3 a, double c) { return a -= c; }
Jet3 operator-(double c, const Jet3& a) { return (-a) += c; }
Jet3 operator*(Jet3 a, double c) { return a *= c; }
Jet3 operator*(double c, Jet3 a) { return a *= c; }
Jet3 operator/(Jet3 a, double c) { return a /= c; }
Jet3 operator/(double c, const Jet3& a) { return reciprocal(a) *= c; }

Jet3 reciprocal(const Jet3& a) {
  const double x = a.value();
  if (x == 0.0) throw DomainError("division by a jet with zero value");
  const double r = 1.0 / x;
  return a.compose({r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
}

Jet3 exp(const Jet3& a) {
  const double e = std::exp(a.value());
  return a.compose({e, e, e, e});
}

Jet3 log(const Jet3& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("log of non-positive value " + std::to_string(x));
  const double r = 1.0 / x;
  return a.compose({std::log(x), r, -r * r, 2.0 * r * r * r});
}

Jet3 sin(const Jet3& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return a.compose({s, c, -s, -c});
}

Jet3 cos(const Jet3& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return a.compose({c, -s, -c, s});
}

Jet3 tan(const Jet3& a) {
  if (std::abs(std::cos(a.value())) < 1e-300) {
    throw DomainError("tan at a pole");
  }
  const double t = std::tan(a.value());
  const double sec2 = 1.0 + t * t;
  return a.compose({t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (1.0 + 3.0 * t * t)});
}

Jet3 sinh(const Jet3& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return a.compose({s, c, s, c});
}

Jet3 cosh(const Jet3& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return a.compose({c, s, c, s});
}

Jet3 tanh(const Jet3& a) {
  const double t = std::tanh(a.value());
  const double sech2 = 1.0 - t * t;
  return a.compose({t, sech2, -2.0 * t * sech2, -2.0 * sech2 * (1.0 - 3.0 * t * t)});
}

Jet3 sqrt(const Jet3& a) {
  const double x = a.value();
  // The square root is not differentiable at 0, so jets need x > 0.
  if (!(x > 0.0)) throw DomainError("sqrt of non-positive jet value " + std::to_string(x));
  const double s = std::sqrt(x);
  return a.compose({s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)});
}

Jet3 pow(const Jet3& a, int k) {
  if (k < 0) return reciprocal(pow(a, -k));
  Jet3 result(a.dimension(), 1.0);
  Jet3 base = a;
  unsigned e = static_cast<unsigned>(k);
  bool first = true;
  while (e != 0) {
    if (e & 1U) {
      result = first ? base : result * base;
      first = false;
    }
    e >>= 1U;
    if (e != 0) base = base * base;
  }
  return result;
}

std::vector<Jet3> seed(std::span<const double> point) {
  return seed(point, static_cast<int>(point.size()));
}

std::vector<Jet3> seed(std::span<const double> point, int n) {
  if (n < 2) throw JetDimensionError("seeding needs at least 2 variables");
  if (static_cast<int>(point.size()) != n) {
    throw JetDimensionError("point has " + std::to_string(point.size()) +
                            " coordinates, expected " + std::to_string(n));
  }
  std::vector<Jet3> out;
  out.reserve(point.size());
  for (int i = 0; i < n; ++i) out.push_back(Jet3::variable(n, i, point[i]));
  return out;
}

double factorial(const MultiIndex& alpha) {
  static constexpr double fact[] = {1.0, 1.0, 2.0, 6.0};
  double f = 1.0;
  for (auto a : alpha) f *= fact[std::min<int>(a, 3)];
  return f;
}

MultiIndex multi_index(std::initializer_list<int> directions) {
  return multi_index(std::span<const int>(directions.begin(), directions.size()));
}

MultiIndex multi_index(std::span<const int> directions) {
  MultiIndex alpha{};
  for (int d : directions) {
    if (d < 0 || d >= kMaxJetDimension) throw std::out_of_range("direction out of range");
    alpha[d] += 1;
  }
  return alpha;
}

}  // namespace qeflat
