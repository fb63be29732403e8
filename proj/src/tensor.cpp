#include "qeflat/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "qeflat/errors.hpp"

namespace qeflat {

namespace {

// Lower-triangular Cholesky factor of a symmetric matrix, row-major.
// Returns false if the matrix is not positive definite.
bool cholesky(std::span<const double> a, int n, std::vector<double>& l) {
  l.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  return true;
}

std::vector<double> cholesky_inverse(const std::vector<double>& l, int n) {
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> col(n);
  for (int c = 0; c < n; ++c) {
    // Solve L y = e_c, then L^T x = y.
    for (int i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= l[i * n + k] * col[k];
      col[i] = s / l[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = col[i];
      for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * inv[k * n + c];
      inv[i * n + c] = s / l[i * n + i];
    }
  }
  return inv;
}

}  // namespace

MetricAtPoint make_metric_at_point(const TensorValue& g) {
  if (g.rank() != 2 || g.variance(0) != Variance::Down || g.variance(1) != Variance::Down) {
    throw std::invalid_argument("metric must be a rank-2 covariant tensor");
  }
  const int n = g.dimension();
  const double scale = std::max(1.0, max_abs(g));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < a; ++b) {
      if (std::abs(g(a, b) - g(b, a)) > 1e-12 * scale) {
        throw PreconditionError("metric is not symmetric");
      }
    }
  }
  std::vector<double> l;
  if (!cholesky(g.components(), n, l)) {
    throw PreconditionError("metric is not positive definite at this point");
  }
  double det = 1.0;
  for (int i = 0; i < n; ++i) det *= l[i * n + i] * l[i * n + i];
  if (!(det > 0.0) || !std::isfinite(det)) throw PreconditionError("metric is singular");

  MetricAtPoint m{g, TensorValue(n, {Variance::Up, Variance::Up}, 0.0), det};
  const auto inv = cholesky_inverse(l, n);
  std::copy(inv.begin(), inv.end(), m.g_inv.components().begin());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int e = 0; e < n; ++e) s += g(a, e) * m.g_inv(e, b);
      if (std::abs(s - (a == b ? 1.0 : 0.0)) > 1e-10 * scale) {
        throw PreconditionError("metric is numerically singular");
      }
    }
  }
  return m;
}

TensorJet invert_metric(const TensorJet& g) {
  // g = G0 + E with E vanishing at the point, so
  // g^-1 = sum_k (-A E)^k A with A = G0^-1, and the series stops at k = order.
  const int n = g.dimension();
  const MetricAtPoint m0 = make_metric_at_point(values(g));
  int order = kJetOrder;
  for (const auto& c : g.components()) order = std::min(order, c.order());

  TensorJet neg_ae(n, {Variance::Up, Variance::Down}, Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Jet3 acc(n, 0.0);
      for (int e = 0; e < n; ++e) {
        Jet3 ee = g(e, b);
        ee -= ee.value();
        acc -= m0.g_inv(a, e) * ee;
      }
      neg_ae(a, b) = acc;
    }
  }

  TensorJet term(n, {Variance::Up, Variance::Up}, Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) term(a, b) = Jet3(n, m0.g_inv(a, b));
  }
  TensorJet sum = term;
  for (int k = 1; k <= order; ++k) {
    TensorJet next(n, {Variance::Up, Variance::Up}, Jet3(n, 0.0));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        Jet3 acc(n, 0.0);
        for (int e = 0; e < n; ++e) acc += neg_ae(a, e) * term(e, b);
        next(a, b) = acc;
      }
    }
    term = std::move(next);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
  }
  for (auto& c : sum.components()) c = c.truncated(order);
  return sum;
}

TensorValue values(const TensorJet& t) {
  TensorValue out(t.dimension(), t.variance(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].value();
  return out;
}

double max_abs(const TensorValue& t) {
  double m = 0.0;
  for (double x : t.components()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_difference(const TensorValue& a, const TensorValue& b) {
  if (a.size() != b.size()) throw std::invalid_argument("tensor shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TensorJet covariant_derivative(const TensorJet& field, const TensorJet& gamma) {
  const int n = field.dimension();
  const int r = field.rank();
  if (gamma.dimension() != n || gamma.rank() != 3) {
    throw std::invalid_argument("Christoffel symbols must be rank 3 in the field's dimension");
  }
  int field_order = kJetOrder;
  for (const auto& c : field.components()) field_order = std::min(field_order, c.order());
  if (field_order < 1) {
    throw std::logic_error("insufficient jet order for a covariant derivative");
  }

  auto variance = field.variance();
  variance.push_back(Variance::Down);
  TensorJet out(n, variance, Jet3(n, 0.0));

  std::vector<int> idx(r + 1);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out.multi_index_of(flat, idx);
    const int c = idx[r];
    const std::size_t base = flat / static_cast<std::size_t>(n);
    Jet3 acc = field[base].derivative(c);
    for (int s = 0; s < r; ++s) {
      const int i = idx[s];
      const std::size_t stride = field.stride(s);
      const std::size_t cleared = base - static_cast<std::size_t>(i) * stride;
      for (int e = 0; e < n; ++e) {
        const Jet3& te = field[cleared + static_cast<std::size_t>(e) * stride];
        if (field.variance(s) == Variance::Up) {
          acc += gamma(i, c, e) * te;
        } else {
          acc -= gamma(e, c, i) * te;
        }
      }
    }
    out[flat] = acc;
  }
  return out;
}

}  // namespace qeflat
