#pragma once

#include <stdexcept>
#include <string>

namespace qeflat {

/// An evaluation left the domain of a function (log of non-positive value,
/// division by zero, ...). The message names the offending subexpression.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition of a geometric operation does not hold at the given input:
/// singular metric, critical point of the potential, non-adapted chart.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qeflat
