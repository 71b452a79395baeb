#pragma once

#include <gmpxx.h>

#include <cmath>

#include "nlv/numeric/interval.hpp"

namespace nlv::numeric {

/// Fast tier: hardware doubles. Field operations and sqrt round outward by
/// one ulp unless the result is exact; transcendentals always widen.
/// Used only to propose certificates; nothing it computes is trusted.
class FastArith {
 public:
  using scalar_type = double;
  using interval_type = FastInterval;

  static double down(double x) { return std::nextafter(x, -HUGE_VAL); }
  static double up(double x) { return std::nextafter(x, HUGE_VAL); }

  FastInterval constant(const mpq_class& q) const;
  FastInterval hull(double lo, double hi) const { return {lo, hi}; }
  FastInterval point(double x) const { return {x, x}; }
  FastInterval symmetric(double w) const { return {-w, w}; }

  FastInterval neg(const FastInterval& a) const { return {-a.hi, -a.lo}; }
  FastInterval add(const FastInterval& a, const FastInterval& b) const;
  FastInterval sub(const FastInterval& a, const FastInterval& b) const;
  FastInterval mul(const FastInterval& a, const FastInterval& b) const;
  FastInterval div(const FastInterval& a, const FastInterval& b) const;
  FastInterval pow(const FastInterval& a, unsigned k) const;
  FastInterval sqrt(const FastInterval& a) const;
  FastInterval atan(const FastInterval& a) const;
  FastInterval acos(const FastInterval& a) const;
  FastInterval pi() const;

  double zero() const { return 0.0; }
  double add_up(double a, double b) const { return add({a, a}, {b, b}).hi; }
  double sub_down(double a, double b) const { return sub({a, a}, {b, b}).lo; }
  double sub_up(double a, double b) const { return sub({a, a}, {b, b}).hi; }
  double mul_up(double a, double b) const { return mul({a, a}, {b, b}).hi; }
  double half_up(double a) const { return up(a * 0.5); }
  double twice_up(double a) const { return up(a * 2.0); }
  double abs_bound(const FastInterval& a) const { return std::max(-a.lo, a.hi); }
  double round_down(double x) const { return x; }
  double round_up(double x) const { return x; }
  double midpoint(double lo, double hi) const { return lo + (hi - lo) * 0.5; }
};

}  // namespace nlv::numeric
