#include "qeflat/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "qeflat/errors.hpp"

namespace qeflat {

namespace {

TensorJet christoffel_jets(const TensorJet& g, const TensorJet& g_inv) {
  const int n = g.dimension();
  // dg(e, a, b) = d_e g_ab, order 2.
  std::vector<Jet3> dg(static_cast<std::size_t>(n) * n * n);
  for (int e = 0; e < n; ++e) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        Jet3 d = g(a, b).derivative(e);
        dg[(e * n + b) * n + a] = d;
        dg[(e * n + a) * n + b] = std::move(d);
      }
    }
  }
  auto d = [&](int e, int a, int b) -> const Jet3& { return dg[(e * n + a) * n + b]; };

  TensorJet gamma(n, {Variance::Up, Variance::Down, Variance::Down}, Jet3(n, 0.0));
  for (int b = 0; b < n; ++b) {
    for (int c = b; c < n; ++c) {
      // First kind: Gamma_{dbc} = (d_b g_dc + d_c g_bd - d_d g_bc) / 2.
      std::vector<Jet3> first(n);
      for (int k = 0; k < n; ++k) first[k] = 0.5 * (d(b, k, c) + d(c, b, k) - d(k, b, c));
      for (int a = 0; a < n; ++a) {
        Jet3 acc = g_inv(a, 0) * first[0];
        for (int k = 1; k < n; ++k) acc += g_inv(a, k) * first[k];
        gamma(a, c, b) = acc;
        gamma(a, b, c) = std::move(acc);
      }
    }
  }
  return gamma;
}

TensorJet riemann_jets(const TensorJet& gamma, const TensorJet& g) {
  const int n = g.dimension();
  // dgamma[e][flat(d, a, c)] = d_e Gamma^d_{ac}
  std::vector<TensorJet> dgamma;
  dgamma.reserve(n);
  for (int e = 0; e < n; ++e) {
    TensorJet t(n, gamma.variance(), Jet3(n, 0.0));
    for (std::size_t k = 0; k < gamma.size(); ++k) t[k] = gamma[k].derivative(e);
    dgamma.push_back(std::move(t));
  }

  // R^d_{abc}, stored as up(d, a, b, c).
  TensorJet up(n, {Variance::Up, Variance::Down, Variance::Down, Variance::Down}, Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;  // antisymmetric in (a, b)
      if (b < a) {
        for (int c = 0; c < n; ++c) {
          for (int dd = 0; dd < n; ++dd) up(dd, a, b, c) = -up(dd, b, a, c);
        }
        continue;
      }
      for (int c = 0; c < n; ++c) {
        for (int dd = 0; dd < n; ++dd) {
          Jet3 acc = dgamma[b](dd, a, c) - dgamma[a](dd, b, c);
          for (int e = 0; e < n; ++e) {
            acc += gamma(e, a, c) * gamma(dd, b, e) - gamma(e, b, c) * gamma(dd, a, e);
          }
          up(dd, a, b, c) = std::move(acc);
        }
      }
    }
  }

  TensorJet down(n, downs(4), Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int dd = 0; dd < n; ++dd) {
          Jet3 acc = g(dd, 0) * up(0, a, b, c);
          for (int e = 1; e < n; ++e) acc += g(dd, e) * up(e, a, b, c);
          down(a, b, c, dd) = std::move(acc);
        }
      }
    }
  }
  return down;
}

}  // namespace

CurvatureJets curvature_jets(const MetricSpec& chart, std::span<const double> point) {
  CurvatureJets c;
  c.g = chart.metric_jets(point);
  c.g_inv = invert_metric(c.g);
  c.christoffel = christoffel_jets(c.g, c.g_inv);
  c.riemann = riemann_jets(c.christoffel, c.g);
  const int n = chart.dimension();
  c.ricci = TensorJet(n, downs(2), Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int cc = a; cc < n; ++cc) {
      Jet3 acc(n, 0.0);
      for (int b = 0; b < n; ++b) {
        for (int d = 0; d < n; ++d) acc += c.g_inv(b, d) * c.riemann(a, b, cc, d);
      }
      c.ricci(cc, a) = acc;
      c.ricci(a, cc) = std::move(acc);
    }
  }
  c.scalar = Jet3(n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) c.scalar += c.g_inv(a, b) * c.ricci(a, b);
  }
  return c;
}

TensorJet weyl_jets(const CurvatureJets& c) {
  const int n = c.g.dimension();
  if (n < 4) {
    throw std::invalid_argument(
        "the Weyl tensor is identically zero in dimension 3; use the Cotton tensor");
  }
  const Jet3 k1 = c.scalar / static_cast<double>((n - 1) * (n - 2));
  const double k2 = 1.0 / (n - 2);
  const auto& g = c.g;
  const auto& r = c.ricci;
  TensorJet w(n, downs(4), Jet3(n, 0.0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int cc = 0; cc < n; ++cc) {
        for (int d = 0; d < n; ++d) {
          w(a, b, cc, d) = c.riemann(a, b, cc, d) +
                           k1 * (g(a, cc) * g(b, d) - g(a, d) * g(b, cc)) -
                           k2 * (r(a, cc) * g(b, d) - r(a, d) * g(b, cc) + r(b, d) * g(a, cc) -
                                 r(b, cc) * g(a, d));
        }
      }
    }
  }
  return w;
}

TensorValue weyl_from(const TensorValue& riemann, const TensorValue& ricci, double scalar,
                      const TensorValue& g) {
  const int n = g.dimension();
  if (n < 4) {
    throw std::invalid_argument(
        "the Weyl tensor is identically zero in dimension 3; use the Cotton tensor");
  }
  const double k1 = scalar / ((n - 1.0) * (n - 2.0));
  const double k2 = 1.0 / (n - 2.0);
  TensorValue w(n, downs(4), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          w(a, b, c, d) = riemann(a, b, c, d) + k1 * (g(a, c) * g(b, d) - g(a, d) * g(b, c)) -
                          k2 * (ricci(a, c) * g(b, d) - ricci(a, d) * g(b, c) +
                                ricci(b, d) * g(a, c) - ricci(b, c) * g(a, d));
        }
      }
    }
  }
  return w;
}

TensorValue cotton_from(const TensorValue& ricci_gradient, const TensorValue& scalar_gradient,
                        const TensorValue& g) {
  const int n = g.dimension();
  const double k = 1.0 / (2.0 * (n - 1));
  TensorValue c(n, downs(3), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int cc = 0; cc < n; ++cc) {
        c(a, b, cc) = ricci_gradient(a, b, cc) - ricci_gradient(a, cc, b) -
                      k * (scalar_gradient(cc) * g(a, b) - scalar_gradient(b) * g(a, cc));
      }
    }
  }
  return c;
}

CurvaturePack curvature_pack(const CurvatureJets& jets, std::span<const double> point) {
  const int n = jets.g.dimension();
  CurvaturePack p;
  p.point.assign(point.begin(), point.end());
  p.metric = make_metric_at_point(values(jets.g));
  p.christoffel = values(jets.christoffel);
  p.riemann = values(jets.riemann);
  p.ricci = values(jets.ricci);
  p.scalar = jets.scalar.value();
  if (n >= 4) p.weyl = weyl_from(p.riemann, p.ricci, p.scalar, p.metric.g);
  p.ricci_gradient = values(covariant_derivative(jets.ricci, jets.christoffel));
  p.scalar_gradient = TensorValue(n, downs(1), 0.0);
  for (int c = 0; c < n; ++c) p.scalar_gradient(c) = jets.scalar.derivative(c).value();
  p.cotton = cotton_from(p.ricci_gradient, p.scalar_gradient, p.metric.g);
  return p;
}

CurvaturePack curvature_pack(const MetricSpec& chart, std::span<const double> point) {
  return curvature_pack(curvature_jets(chart, point), point);
}

TensorValue christoffel(const MetricSpec& chart, std::span<const double> point) {
  const auto g = chart.metric_jets(point);
  return values(christoffel_jets(g, invert_metric(g)));
}

TensorValue riemann(const MetricSpec& chart, std::span<const double> point) {
  return values(curvature_jets(chart, point).riemann);
}

std::pair<TensorValue, double> ricci_scalar(const MetricSpec& chart, std::span<const double> point) {
  const auto c = curvature_jets(chart, point);
  return {values(c.ricci), c.scalar.value()};
}

TensorValue weyl(const MetricSpec& chart, std::span<const double> point) {
  if (chart.dimension() < 4) {
    throw std::invalid_argument(
        "the Weyl tensor is identically zero in dimension 3; use the Cotton tensor");
  }
  return *curvature_pack(chart, point).weyl;
}

TensorValue cotton(const MetricSpec& chart, std::span<const double> point) {
  if (chart.dimension() < 3) throw std::invalid_argument("the Cotton tensor needs n >= 3");
  return curvature_pack(chart, point).cotton;
}

double tensor_norm(const TensorValue& t, const MetricAtPoint& m) {
  TensorValue raised = t;
  for (int s = 0; s < t.rank(); ++s) {
    if (raised.variance(s) == Variance::Down) raised = raise_lower(raised, s, m);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) sum += t[i] * raised[i];
  return std::sqrt(std::max(sum, 0.0));
}

Defects curvature_identity_defects(const CurvaturePack& p) {
  const int n = p.metric.g.dimension();
  const auto& R = p.riemann;
  Defects out;

  double gsym = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        gsym = std::max(gsym, std::abs(p.christoffel(a, b, c) - p.christoffel(a, c, b)));
      }
    }
  }
  out.emplace_back("christoffel_symmetry", scaled(gsym, max_abs(p.christoffel)));

  double sym = 0.0;
  double bianchi = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          const double r = R(a, b, c, d);
          sym = std::max({sym, std::abs(r + R(b, a, c, d)), std::abs(r + R(a, b, d, c)),
                          std::abs(r - R(c, d, a, b))});
          bianchi = std::max(bianchi, std::abs(r + R(b, c, a, d) + R(c, a, b, d)));
        }
      }
    }
  }
  const double rscale = max_abs(R);
  out.emplace_back("riemann_symmetry", scaled(sym, rscale));
  out.emplace_back("first_bianchi", scaled(bianchi, rscale));

  double rsym = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) rsym = std::max(rsym, std::abs(p.ricci(a, b) - p.ricci(b, a)));
  }
  out.emplace_back("ricci_symmetry", scaled(rsym, max_abs(p.ricci)));

  // Contracted second Bianchi: nabla_b R = 2 g^{ac} nabla_c R_ab.
  double schur = 0.0;
  for (int b = 0; b < n; ++b) {
    double div = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) div += p.metric.g_inv(a, c) * p.ricci_gradient(a, b, c);
    }
    schur = std::max(schur, std::abs(p.scalar_gradient(b) - 2.0 * div));
  }
  out.emplace_back("schur", scaled(schur, std::max(max_abs(p.scalar_gradient),
                                                   n * max_abs(p.ricci_gradient))));

  if (p.weyl) {
    const TensorValue& W = *p.weyl;
    double trace = 0.0;
    for (int s1 = 0; s1 < 4; ++s1) {
      for (int s2 = s1 + 1; s2 < 4; ++s2) {
        const TensorValue mixed = raise_lower(W, s1, p.metric);
        trace = std::max(trace, max_abs(contract(mixed, s1, s2)));
      }
    }
    out.emplace_back("weyl_trace", scaled(trace, rscale));
  }

  double cas = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) cas = std::max(cas, std::abs(p.cotton(a, b, c) + p.cotton(a, c, b)));
    }
  }
  const double cscale = max_abs(p.ricci_gradient);
  out.emplace_back("cotton_antisymmetry", scaled(cas, cscale));
  const TensorValue ctrace = contract(raise_lower(p.cotton, 0, p.metric), 0, 1);
  out.emplace_back("cotton_trace", scaled(max_abs(ctrace), cscale));
  return out;
}

Defects curvature_norms(const CurvaturePack& p) {
  Defects out;
  out.emplace_back("norm_riemann", tensor_norm(p.riemann, p.metric));
  out.emplace_back("norm_ricci", tensor_norm(p.ricci, p.metric));
  out.emplace_back("abs_scalar", std::abs(p.scalar));
  if (p.weyl) out.emplace_back("norm_weyl", tensor_norm(*p.weyl, p.metric));
  out.emplace_back("norm_cotton", tensor_norm(p.cotton, p.metric));
  return out;
}

Defects lcf_defects(const CurvaturePack& p) {
  Defects out;
  if (p.weyl) {
    out.emplace_back("weyl_defect",
                     scaled(tensor_norm(*p.weyl, p.metric), tensor_norm(p.riemann, p.metric)));
  }
  out.emplace_back("cotton_defect", scaled(tensor_norm(p.cotton, p.metric),
                                           tensor_norm(p.ricci_gradient, p.metric)));
  return out;
}

double weyl_divergence_defect(const CurvatureJets& jets) {
  const int n = jets.g.dimension();
  const TensorJet w = weyl_jets(jets);
  const TensorValue dw = values(covariant_derivative(w, jets.christoffel));
  const CurvaturePack p = curvature_pack(jets, {});
  const TensorValue g_inv = values(jets.g_inv);
  const double k = (n - 3.0) / (n - 2.0);
  double diff = 0.0;
  double scale = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        double div = 0.0;
        for (int d = 0; d < n; ++d) {
          for (int e = 0; e < n; ++e) div += g_inv(d, e) * dw(d, a, b, c, e);
        }
        diff = std::max(diff, std::abs(div + k * p.cotton(a, b, c)));
        scale = std::max({scale, std::abs(div), std::abs(p.cotton(a, b, c))});
      }
    }
  }
  return scaled(diff, scale);
}

CheckReport check_weyl_divergence(const MetricSpec& chart, std::span<const double> point,
                                  double tolerance) {
  if (chart.dimension() < 4) {
    throw std::invalid_argument("the Weyl divergence relation needs n >= 4");
  }
  CheckReport report("weyl_divergence");
  report.source = chart.name();
  const auto jets = curvature_jets(chart, point);
  report.add_point(Point(point.begin(), point.end()),
                   {{"weyl_divergence", weyl_divergence_defect(jets)}});
  report.require("weyl_divergence", tolerance);
  report.finalize();
  return report;
}

}  // namespace qeflat
