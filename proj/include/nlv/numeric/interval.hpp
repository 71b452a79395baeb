#pragma once

#include <stdexcept>

#include "nlv/numeric/precise_float.hpp"

namespace nlv::numeric {

/// Closed interval [lo, hi]; lo <= hi is maintained by every arithmetic op.
template <class T>
struct BasicInterval {
  T lo{};
  T hi{};

  bool contains(const T& x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= T{} && T{} <= hi; }
};

using Interval = BasicInterval<PreciseFloat>;
using FastInterval = BasicInterval<double>;

/// Raised when an operand leaves the domain of an operation (division by an
/// interval containing zero, sqrt of a negative, acos outside [-1, 1]).
/// Callers treat it as "inconclusive on this box", never as falsity.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace nlv::numeric
