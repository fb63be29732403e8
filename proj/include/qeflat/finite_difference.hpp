#pragma once

// Central finite-difference partial derivatives. This is the verification
// oracle for the jet engine: it only ever evaluates expressions on plain
// doubles.

#include <functional>
#include <span>

#include "qeflat/expr.hpp"
#include "qeflat/jet.hpp"

namespace qeflat {

using ScalarField = std::function<double(std::span<const double>)>;

/// Step used for a derivative of the given total order at `point`:
/// 1e-4 * max(1, |point|_inf) up to order 2, 1e-3 * max(1, |point|_inf) for order 3.
double fd_step(std::span<const double> point, int order);

/// d^alpha field at point, built as a tensor product of the standard 1-D
/// central stencils for each direction's multiplicity (1, 2 or 3).
double fd_partial(const ScalarField& field, std::span<const double> point, const MultiIndex& alpha);

double fd_partials(const Expression& expr, std::span<const double> point, const MultiIndex& alpha);
double fd_partials(const Expression& expr, std::span<const double> point,
                   std::initializer_list<int> directions);

}  // namespace qeflat
