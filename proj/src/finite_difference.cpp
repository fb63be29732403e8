#include "qeflat/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qeflat {

namespace {

struct StencilPoint {
  int offset;
  double weight;
};

// Weights in units of h^-m for an m-th derivative.
std::vector<StencilPoint> stencil(int multiplicity) {
  switch (multiplicity) {
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    default: throw std::invalid_argument("finite-difference order must be 1, 2 or 3");
  }
}

}  // namespace

double fd_step(std::span<const double> point, int order) {
  double scale = 1.0;
  for (double x : point) scale = std::max(scale, std::abs(x));
  return (order >= 3 ? 1e-3 : 1e-4) * scale;
}

double fd_partial(const ScalarField& field, std::span<const double> point, const MultiIndex& alpha) {
  int order = 0;
  std::vector<int> dirs;
  for (int d = 0; d < kMaxJetDimension; ++d) {
    if (alpha[d] == 0) continue;
    if (d >= static_cast<int>(point.size())) {
      throw std::out_of_range("finite-difference direction beyond point dimension");
    }
    order += alpha[d];
    dirs.push_back(d);
  }
  if (order > 3) throw std::invalid_argument("finite differences limited to order 3");
  if (order == 0) return field(point);

  const double h = fd_step(point, order);
  std::vector<std::vector<StencilPoint>> stencils;
  for (int d : dirs) stencils.push_back(stencil(alpha[d]));

  std::vector<double> x(point.begin(), point.end());
  std::vector<std::size_t> pick(dirs.size(), 0);
  double sum = 0.0;
  for (;;) {
    double weight = 1.0;
    std::copy(point.begin(), point.end(), x.begin());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const auto& s = stencils[k][pick[k]];
      weight *= s.weight;
      x[dirs[k]] += s.offset * h;
    }
    sum += weight * field(x);
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == stencils[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return sum / std::pow(h, order);
}

double fd_partials(const Expression& expr, std::span<const double> point, const MultiIndex& alpha) {
  return fd_partial([&](std::span<const double> x) { return evaluate(expr, x); }, point, alpha);
}

double fd_partials(const Expression& expr, std::span<const double> point,
                   std::initializer_list<int> directions) {
  return fd_partials(expr, point, multi_index(directions));
}

}  // namespace qeflat
