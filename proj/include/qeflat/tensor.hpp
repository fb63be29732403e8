#pragma once

// Dense pointwise tensors with per-slot variance.
//
// Components are stored row-major over the multi-index (i_0, ..., i_{r-1}),
// each index running over [0, n). Symmetries are never assumed by storage.
// The component type is a double for plain values or a Jet3 when the tensor
// is a field expanded around a point.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qeflat/jet.hpp"

namespace qeflat {

enum class Variance : std::uint8_t { Down, Up };

inline Variance flipped(Variance v) { return v == Variance::Down ? Variance::Up : Variance::Down; }

template <class T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int n, std::vector<Variance> variance, T fill)
      : n_(n), variance_(std::move(variance)) {
    if (n < 1) throw std::invalid_argument("tensor dimension must be positive");
    std::size_t size = 1;
    for (std::size_t k = 0; k < variance_.size(); ++k) size *= static_cast<std::size_t>(n);
    data_.assign(size, fill);
  }

  int dimension() const { return n_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  const std::vector<Variance>& variance() const { return variance_; }
  Variance variance(int slot) const { return variance_.at(slot); }
  std::size_t size() const { return data_.size(); }

  std::span<T> components() { return data_; }
  std::span<const T> components() const { return data_; }
  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  T& operator()(I... idx) {
    return data_[flat_index({static_cast<int>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[flat_index({static_cast<int>(idx)...})];
  }

  T& at(std::span<const int> idx) { return data_[flat_index(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[flat_index(idx)]; }

  std::size_t flat_index(std::initializer_list<int> idx) const {
    return flat_index(std::span<const int>(idx.begin(), idx.size()));
  }
  std::size_t flat_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) {
      throw std::out_of_range("expected " + std::to_string(rank()) + " indices, got " +
                              std::to_string(idx.size()));
    }
    std::size_t flat = 0;
    for (int i : idx) {
      if (i < 0 || i >= n_) throw std::out_of_range("tensor index out of range");
      flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return flat;
  }

  /// Decodes a flat position into its multi-index.
  void multi_index_of(std::size_t flat, std::span<int> out) const {
    for (int s = rank() - 1; s >= 0; --s) {
      out[s] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
  }

  std::size_t stride(int slot) const {
    std::size_t s = 1;
    for (int k = rank() - 1; k > slot; --k) s *= static_cast<std::size_t>(n_);
    return s;
  }

 private:
  int n_ = 0;
  std::vector<Variance> variance_;
  std::vector<T> data_;
};

using TensorValue = BasicTensor<double>;
using TensorJet = BasicTensor<Jet3>;

inline std::vector<Variance> downs(int rank) { return std::vector<Variance>(rank, Variance::Down); }

/// A nondegenerate positive-definite metric at one point.
struct MetricAtPoint {
  TensorValue g;      // g_ab
  TensorValue g_inv;  // g^ab
  double det = 0.0;
};

/// Validates symmetry and positive definiteness (Cholesky) and inverts.
/// Throws PreconditionError for asymmetric, singular or indefinite input.
MetricAtPoint make_metric_at_point(const TensorValue& g);

/// Inverse of a jet-valued metric, exact to the metric's jet order.
TensorJet invert_metric(const TensorJet& g);

/// Plain component values of a jet-valued tensor.
TensorValue values(const TensorJet& t);

double max_abs(const TensorValue& t);
double max_abs_difference(const TensorValue& a, const TensorValue& b);

/// Flips the variance of `slot` by contracting with g (to lower) or g_inv (to raise).
template <class T>
BasicTensor<T> raise_lower(const BasicTensor<T>& t, int slot, const BasicTensor<T>& g,
                           const BasicTensor<T>& g_inv) {
  if (slot < 0 || slot >= t.rank()) throw std::out_of_range("slot out of range");
  const bool raising = t.variance(slot) == Variance::Down;
  const BasicTensor<T>& m = raising ? g_inv : g;
  auto variance = t.variance();
  variance[slot] = flipped(variance[slot]);
  const int n = t.dimension();
  BasicTensor<T> out(n, variance, t[0] * 0.0);
  const std::size_t stride = t.stride(slot);
  std::vector<int> idx(t.rank());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out.multi_index_of(flat, idx);
    const int a = idx[slot];
    const std::size_t base = flat - static_cast<std::size_t>(a) * stride;
    T acc = m(a, 0) * t[base];
    for (int e = 1; e < n; ++e) acc += m(a, e) * t[base + static_cast<std::size_t>(e) * stride];
    out[flat] = acc;
  }
  return out;
}

inline TensorValue raise_lower(const TensorValue& t, int slot, const MetricAtPoint& m) {
  return raise_lower(t, slot, m.g, m.g_inv);
}

/// Sums over one up slot and one down slot; the result drops both slots.
template <class T>
BasicTensor<T> contract(const BasicTensor<T>& t, int slot_a, int slot_b) {
  if (slot_a < 0 || slot_b < 0 || slot_a >= t.rank() || slot_b >= t.rank() || slot_a == slot_b) {
    throw std::out_of_range("invalid contraction slots");
  }
  if (t.variance(slot_a) == t.variance(slot_b)) {
    throw std::invalid_argument("contraction needs one up and one down slot; raise one first");
  }
  std::vector<Variance> variance;
  for (int s = 0; s < t.rank(); ++s) {
    if (s != slot_a && s != slot_b) variance.push_back(t.variance(s));
  }
  const int n = t.dimension();
  const T zero = t[0] * 0.0;
  if (variance.empty()) {
    T acc = zero;
    for (int e = 0; e < n; ++e) acc += t[static_cast<std::size_t>(e) * (t.stride(slot_a) + t.stride(slot_b))];
    BasicTensor<T> out(n, {}, acc);
    return out;
  }
  BasicTensor<T> out(n, variance, zero);
  std::vector<int> idx(out.rank());
  std::vector<int> full(t.rank());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out.multi_index_of(flat, idx);
    for (int s = 0, k = 0; s < t.rank(); ++s) {
      full[s] = (s == slot_a || s == slot_b) ? 0 : idx[k++];
    }
    const std::size_t base = t.flat_index(full);
    const std::size_t step = t.stride(slot_a) + t.stride(slot_b);
    T acc = zero;
    for (int e = 0; e < n; ++e) acc += t[base + static_cast<std::size_t>(e) * step];
    out[flat] = acc;
  }
  return out;
}

/// Covariant derivative of a jet-valued tensor field with Christoffel symbols
/// gamma(a, b, c) = Gamma^a_{bc}. The derivative slot is appended last and is
/// covariant: out(i..., c) = (nabla_c T)_{i...}. The result is exact to one jet
/// order less than the field (and no more than gamma's order).
TensorJet covariant_derivative(const TensorJet& field, const TensorJet& gamma);

}  // namespace qeflat
