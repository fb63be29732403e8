#pragma once

// Truncated multivariate Taylor arithmetic of total order 3.
//
// A Jet3 in n variables stores the Taylor coefficients u_alpha = d^alpha u / alpha!
// for every multi-index alpha with |alpha| <= 3, so a product is a plain
// truncated convolution. Each jet also carries the order up to which its
// coefficients are exact: seeds are exact to order 3, and differentiating a jet
// drops that by one. Arithmetic on jets of different exactness yields the
// smaller one.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace qeflat {

inline constexpr int kJetOrder = 3;
inline constexpr int kMaxJetDimension = 8;

using MultiIndex = std::array<std::uint8_t, kMaxJetDimension>;

/// Monomial table for one dimension: multi-indices sorted by total degree,
/// plus the precomputed product and derivative index lists.
class JetLayout {
 public:
  static const JetLayout& get(int n);

  int dimension() const { return n_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& multi_index(std::size_t k) const { return indices_[k]; }
  int degree(std::size_t k) const { return degree_[k]; }
  /// Number of monomials with degree <= order.
  std::size_t count_up_to(int order) const { return prefix_[order]; }
  std::size_t index_of(const MultiIndex& alpha) const;

  struct ProductTerm {
    std::uint16_t lhs, rhs, out;
  };
  /// Pairs (a, b) with deg a + deg b <= order, grouped by output degree.
  std::span<const ProductTerm> products(int order) const {
    return {products_.data(), product_prefix_[order]};
  }

  struct DerivativeTerm {
    std::uint16_t src, dst;
    double factor;
  };
  std::span<const DerivativeTerm> derivative_terms(int direction) const {
    return derivative_[direction];
  }

 private:
  explicit JetLayout(int n);

  int n_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degree_;
  std::array<std::size_t, kJetOrder + 1> prefix_{};
  std::vector<std::int32_t> lookup_;
  std::vector<ProductTerm> products_;
  std::array<std::size_t, kJetOrder + 1> product_prefix_{};
  std::vector<std::vector<DerivativeTerm>> derivative_;
};

class JetDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Jet3 {
 public:
  /// Empty jet (dimension 0); only useful as a placeholder before assignment.
  Jet3() = default;
  /// Constant jet c in n variables.
  Jet3(int n, double c);

  static Jet3 constant(int n, double c) { return Jet3(n, c); }
  /// The coordinate function x^i expanded at value v.
  static Jet3 variable(int n, int i, double v);

  int dimension() const { return layout_ ? layout_->dimension() : 0; }
  int order() const { return order_; }
  const JetLayout& layout() const { return *layout_; }

  double value() const { return coeffs_[0]; }
  std::span<const double> coefficients() const { return coeffs_; }
  double coefficient(const MultiIndex& alpha) const;
  double coefficient_at(std::size_t k) const { return coeffs_[k]; }

  /// Raw partial derivative d^alpha u = alpha! * coefficient.
  double partial(const MultiIndex& alpha) const;
  /// Shorthands for partial derivatives along listed directions.
  double partial(std::initializer_list<int> directions) const;

  /// Jet of d u / d x^direction, exact to one order less.
  Jet3 derivative(int direction) const;
  /// Same jet, declared exact only up to `order` (higher coefficients zeroed).
  Jet3 truncated(int order) const;

  Jet3& operator+=(const Jet3& rhs);
  Jet3& operator-=(const Jet3& rhs);
  Jet3& operator*=(const Jet3& rhs);
  Jet3& operator/=(const Jet3& rhs);
  Jet3& operator+=(double c);
  Jet3& operator-=(double c);
  Jet3& operator*=(double c);
  Jet3& operator/=(double c);

  Jet3 operator-() const;

  /// f(u) given f and its first three derivatives at u's value.
  Jet3 compose(const std::array<double, 4>& derivatives) const;

  friend bool operator==(const Jet3& a, const Jet3& b) = default;
  friend Jet3 operator*(const Jet3& a, const Jet3& b);

 private:
  void require_same_dimension(const Jet3& other) const;

  const JetLayout* layout_ = nullptr;
  int order_ = kJetOrder;
  std::vector<double> coeffs_;
};

Jet3 operator+(Jet3 a, const Jet3& b);
Jet3 operator-(Jet3 a, const Jet3& b);
Jet3 operator*(const Jet3& a, const Jet3& b);
Jet3 operator/(const Jet3& a, const Jet3& b);
Jet3 operator+(Jet3 a, double c);
Jet3 operator+(double c, Jet3 a);
Jet3 operator-(Jet3 a, double c);
Jet3 operator-(double c, const Jet3& a);
Jet3 operator*(Jet3 a, double c);
Jet3 operator*(double c, Jet3 a);
Jet3 operator/(Jet3 a, double c);
Jet3 operator/(double c, const Jet3& a);

Jet3 reciprocal(const Jet3& a);
Jet3 exp(const Jet3& a);
Jet3 log(const Jet3& a);
Jet3 sin(const Jet3& a);
Jet3 cos(const Jet3& a);
Jet3 tan(const Jet3& a);
Jet3 sinh(const Jet3& a);
Jet3 cosh(const Jet3& a);
Jet3 tanh(const Jet3& a);
Jet3 sqrt(const Jet3& a);
/// a^k by repeated multiplication; negative k goes through the reciprocal.
Jet3 pow(const Jet3& a, int k);

/// One jet per coordinate, jet i being x^i expanded at point[i].
std::vector<Jet3> seed(std::span<const double> point);
std::vector<Jet3> seed(std::span<const double> point, int n);

/// alpha! for a multi-index.
double factorial(const MultiIndex& alpha);
/// Multi-index counting how often each direction appears in the list.
MultiIndex multi_index(std::initializer_list<int> directions);
MultiIndex multi_index(std::span<const int> directions);

}  // namespace qeflat
