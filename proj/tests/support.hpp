#pragma once

// Test-only helpers: random smooth metrics and a finite-difference curvature
// oracle. The oracle differentiates the metric component expressions with
// central differences on plain doubles and assembles everything else by hand
// with nested loops, sharing no code with the jet pipeline.

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qeflat/chart.hpp"
#include "qeflat/finite_difference.hpp"

namespace qeflat::testing {

inline std::vector<std::string> coordinate_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

/// g_ab = delta_ab + 0.15 * (smooth random terms), on [-0.5, 0.5]^n; diagonally
/// dominant there, so positive definite.
inline MetricSpec random_metric(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const auto names = coordinate_names(n);
  auto coef = [&] { return rng.uniform(-1.0, 1.0); };
  auto var = [&] { return names[static_cast<int>(rng.uniform() * n) % n]; };
  std::map<std::pair<int, int>, std::string> comps;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double amp = a == b ? 0.15 : 0.15 / n;
      std::ostringstream s;
      s.precision(17);
      s << (a == b ? "1 + " : "0 + ") << amp << " * (" << coef() << " * sin(" << coef() << " * "
        << var() << " + " << coef() << ") + " << coef() << " * " << var() << " * " << var()
        << " + " << coef() << " * cos(" << var() << " - " << coef() << " * " << var() << ") + "
        << coef() << " * exp(0.5 * " << var() << ") * " << var() << ")";
      comps[{a, b}] = s.str();
    }
  }
  return MetricSpec::from_text("random" + std::to_string(seed), names,
                               std::vector<Interval>(n, Interval{-0.5, 0.5}), comps);
}

inline Point random_point(int n, SplitMix64& rng, double half = 0.5) {
  Point p(n);
  for (auto& x : p) x = rng.uniform(-half, half);
  return p;
}

/// Flat index helpers for plain row-major arrays.
struct Dims {
  int n;
  std::size_t operator()(int a, int b) const { return a * n + b; }
  std::size_t operator()(int a, int b, int c) const { return (a * n + b) * n + c; }
  std::size_t operator()(int a, int b, int c, int d) const { return ((a * n + b) * n + c) * n + d; }
  std::size_t operator()(int a, int b, int c, int d, int e) const {
    return (((a * n + b) * n + c) * n + d) * n + e;
  }
  std::size_t operator()(int a, int b, int c, int d, int e, int f) const {
    return ((((a * n + b) * n + c) * n + d) * n + e) * n + f;
  }
  std::size_t pow(int k) const {
    std::size_t s = 1;
    for (int i = 0; i < k; ++i) s *= n;
    return s;
  }
};

struct OracleCurvature {
  int n = 0;
  std::vector<double> g, ginv;
  std::vector<double> christoffel;      // [d][a][b] = Gamma^d_ab
  std::vector<double> riemann;          // [a][b][c][d] = R_abcd
  std::vector<double> ricci;            // [a][c]
  double scalar = 0.0;
  std::vector<double> weyl;             // [a][b][c][d]
  std::vector<double> ricci_gradient;   // [a][b][c] = nabla_c R_ab
  std::vector<double> scalar_gradient;  // [c]
  std::vector<double> cotton;           // [a][b][c]
};

inline std::vector<double> invert(std::vector<double> m, int n) {
  std::vector<double> inv(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
    }
    for (int k = 0; k < n; ++k) {
      std::swap(m[col * n + k], m[pivot * n + k]);
      std::swap(inv[col * n + k], inv[pivot * n + k]);
    }
    const double d = m[col * n + col];
    for (int k = 0; k < n; ++k) {
      m[col * n + k] /= d;
      inv[col * n + k] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = m[r * n + col];
      for (int k = 0; k < n; ++k) {
        m[r * n + k] -= factor * m[col * n + k];
        inv[r * n + k] -= factor * inv[col * n + k];
      }
    }
  }
  return inv;
}

inline OracleCurvature oracle_curvature(const MetricSpec& chart, const Point& p) {
  const int n = chart.dimension();
  const Dims D{n};
  OracleCurvature o;
  o.n = n;

  // Metric partials up to third order: dg[a][b][c] = d_c g_ab, etc.
  std::vector<double> g(D.pow(2)), dg(D.pow(3)), d2g(D.pow(4)), d3g(D.pow(5));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Expression& e = chart.component(std::min(a, b), std::max(a, b));
      g[D(a, b)] = evaluate(e, std::span<const double>(p));
      for (int c = 0; c < n; ++c) {
        dg[D(a, b, c)] = fd_partials(e, p, {c});
        for (int d = 0; d < n; ++d) {
          d2g[D(a, b, c, d)] = fd_partials(e, p, {c, d});
          for (int f = 0; f < n; ++f) d3g[D(a, b, c, d, f)] = fd_partials(e, p, {c, d, f});
        }
      }
    }
  }
  const auto gi = invert(g, n);

  // d_e g^ab = -g^ac d_e g_cd g^db; d_f d_e g^ab by differentiating once more.
  std::vector<double> dgi(D.pow(3), 0.0), d2gi(D.pow(4), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int e = 0; e < n; ++e) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) s -= gi[D(a, c)] * dg[D(c, d, e)] * gi[D(d, b)];
        dgi[D(a, b, e)] = s;
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int e = 0; e < n; ++e)
        for (int f = 0; f < n; ++f) {
          double s = 0.0;
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
              s -= dgi[D(a, c, f)] * dg[D(c, d, e)] * gi[D(d, b)];
              s -= gi[D(a, c)] * d2g[D(c, d, e, f)] * gi[D(d, b)];
              s -= gi[D(a, c)] * dg[D(c, d, e)] * dgi[D(d, b, f)];
            }
          d2gi[D(a, b, e, f)] = s;
        }

  // Lowered symbols L_cab = (d_a g_bc + d_b g_ac - d_c g_ab)/2 and partials.
  std::vector<double> L(D.pow(3)), dL(D.pow(4)), d2L(D.pow(5));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        L[D(c, a, b)] = 0.5 * (dg[D(b, c, a)] + dg[D(a, c, b)] - dg[D(a, b, c)]);
        for (int e = 0; e < n; ++e) {
          dL[D(c, a, b, e)] =
              0.5 * (d2g[D(b, c, a, e)] + d2g[D(a, c, b, e)] - d2g[D(a, b, c, e)]);
          for (int f = 0; f < n; ++f) {
            d2L[D(c, a, b, e, f)] = 0.5 * (d3g[D(b, c, a, e, f)] + d3g[D(a, c, b, e, f)] -
                                           d3g[D(a, b, c, e, f)]);
          }
        }
      }

  // Gamma^d_ab = g^dc L_cab, with first and second partials.
  std::vector<double> G(D.pow(3), 0.0), dG(D.pow(4), 0.0), d2G(D.pow(5), 0.0);
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          G[D(d, a, b)] += gi[D(d, c)] * L[D(c, a, b)];
          for (int e = 0; e < n; ++e) {
            dG[D(d, a, b, e)] += dgi[D(d, c, e)] * L[D(c, a, b)] + gi[D(d, c)] * dL[D(c, a, b, e)];
            for (int f = 0; f < n; ++f) {
              d2G[D(d, a, b, e, f)] += d2gi[D(d, c, e, f)] * L[D(c, a, b)] +
                                       dgi[D(d, c, e)] * dL[D(c, a, b, f)] +
                                       dgi[D(d, c, f)] * dL[D(c, a, b, e)] +
                                       gi[D(d, c)] * d2L[D(c, a, b, e, f)];
            }
          }
        }

  // R^d_abc = d_b G^d_ac - d_a G^d_bc + G^e_ac G^d_be - G^e_bc G^d_ae, stored [d][a][b][c],
  // plus its partial along f.
  std::vector<double> Rup(D.pow(4), 0.0), dRup(D.pow(5), 0.0);
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double r = dG[D(d, a, c, b)] - dG[D(d, b, c, a)];
          for (int e = 0; e < n; ++e) {
            r += G[D(e, a, c)] * G[D(d, b, e)] - G[D(e, b, c)] * G[D(d, a, e)];
          }
          Rup[D(d, a, b, c)] = r;
          for (int f = 0; f < n; ++f) {
            double dr = d2G[D(d, a, c, b, f)] - d2G[D(d, b, c, a, f)];
            for (int e = 0; e < n; ++e) {
              dr += dG[D(e, a, c, f)] * G[D(d, b, e)] + G[D(e, a, c)] * dG[D(d, b, e, f)] -
                    dG[D(e, b, c, f)] * G[D(d, a, e)] - G[D(e, b, c)] * dG[D(d, a, e, f)];
            }
            dRup[D(d, a, b, c, f)] = dr;
          }
        }

  o.g = g;
  o.ginv = gi;
  o.christoffel = G;
  o.riemann.assign(D.pow(4), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e) o.riemann[D(a, b, c, d)] += g[D(d, e)] * Rup[D(e, a, b, c)];

  // R_ac = R^b_abc and its partials.
  std::vector<double> dRic(D.pow(3), 0.0);
  o.ricci.assign(D.pow(2), 0.0);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b) {
        o.ricci[D(a, c)] += Rup[D(b, a, b, c)];
        for (int f = 0; f < n; ++f) dRic[D(a, c, f)] += dRup[D(b, a, b, c, f)];
      }

  o.scalar = 0.0;
  o.scalar_gradient.assign(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      o.scalar += gi[D(a, c)] * o.ricci[D(a, c)];
      for (int f = 0; f < n; ++f) {
        o.scalar_gradient[f] += dgi[D(a, c, f)] * o.ricci[D(a, c)] + gi[D(a, c)] * dRic[D(a, c, f)];
      }
    }

  o.ricci_gradient.assign(D.pow(3), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = dRic[D(a, b, c)];
        for (int e = 0; e < n; ++e) {
          v -= G[D(e, c, a)] * o.ricci[D(e, b)] + G[D(e, c, b)] * o.ricci[D(a, e)];
        }
        o.ricci_gradient[D(a, b, c)] = v;
      }

  o.cotton.assign(D.pow(3), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        o.cotton[D(a, b, c)] = o.ricci_gradient[D(a, b, c)] - o.ricci_gradient[D(a, c, b)] -
                               (o.scalar_gradient[c] * g[D(a, b)] -
                                o.scalar_gradient[b] * g[D(a, c)]) /
                                   (2.0 * (n - 1));
      }

  if (n >= 4) {
    o.weyl.assign(D.pow(4), 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            const double gg = g[D(a, c)] * g[D(b, d)] - g[D(a, d)] * g[D(b, c)];
            const double rg = o.ricci[D(a, c)] * g[D(b, d)] - o.ricci[D(a, d)] * g[D(b, c)] +
                              o.ricci[D(b, d)] * g[D(a, c)] - o.ricci[D(b, c)] * g[D(a, d)];
            o.weyl[D(a, b, c, d)] = o.riemann[D(a, b, c, d)] - rg / (n - 2) +
                                    o.scalar * gg / ((n - 1.0) * (n - 2.0));
          }
  }
  return o;
}

/// |a - b| <= tol * (1 + |b|).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

}  // namespace qeflat::testing
