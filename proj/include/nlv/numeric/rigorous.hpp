#pragma once

#include <gmpxx.h>

#include "nlv/numeric/interval.hpp"
#include "nlv/numeric/precise_float.hpp"

namespace nlv::numeric {

/// Rigorous tier: software floating point at a fixed base and digit count,
/// every endpoint rounded outward. For any operands, the returned interval
/// contains the exact real image.
class RigorousArith {
 public:
  using scalar_type = PreciseFloat;
  using interval_type = Interval;

  explicit RigorousArith(Precision prec, bool use_cache = true) : prec_(prec), use_cache_(use_cache) {}

  const Precision& precision() const { return prec_; }
  bool uses_cache() const { return use_cache_; }

  Interval constant(const mpq_class& q) const;
  /// Smallest p-digit interval containing [lo, hi].
  Interval hull(const PreciseFloat& lo, const PreciseFloat& hi) const;
  Interval point(const PreciseFloat& x) const { return hull(x, x); }
  /// [-w, w] for w >= 0.
  Interval symmetric(const PreciseFloat& w) const { return hull(numeric::neg(w), w); }

  Interval neg(const Interval& a) const;
  Interval add(const Interval& a, const Interval& b) const;
  Interval sub(const Interval& a, const Interval& b) const;
  Interval mul(const Interval& a, const Interval& b) const;
  Interval div(const Interval& a, const Interval& b) const;
  Interval pow(const Interval& a, unsigned k) const;
  Interval sqrt(const Interval& a) const;
  Interval atan(const Interval& a) const;
  Interval acos(const Interval& a) const;
  Interval pi() const;

  // Directed scalar operations for bound formulas.
  PreciseFloat zero() const { return PreciseFloat::from_parts(0, 0, prec_.base); }
  PreciseFloat add_up(const PreciseFloat& a, const PreciseFloat& b) const;
  PreciseFloat sub_down(const PreciseFloat& a, const PreciseFloat& b) const;
  PreciseFloat sub_up(const PreciseFloat& a, const PreciseFloat& b) const;
  PreciseFloat mul_up(const PreciseFloat& a, const PreciseFloat& b) const;
  PreciseFloat half_up(const PreciseFloat& a) const;
  PreciseFloat twice_up(const PreciseFloat& a) const;
  /// |[lo, hi]| = max(-lo, hi), rounded up.
  PreciseFloat abs_bound(const Interval& a) const;
  PreciseFloat round_down(const PreciseFloat& x) const { return round(x, prec_, Rounding::down); }
  PreciseFloat round_up(const PreciseFloat& x) const { return round(x, prec_, Rounding::up); }
  /// A p-digit point of [lo, hi] near the midpoint.
  PreciseFloat midpoint(const PreciseFloat& lo, const PreciseFloat& hi) const;

 private:
  Interval mul_uncached(const Interval& a, const Interval& b) const;
  Interval div_uncached(const Interval& a, const Interval& b) const;
  Interval pow_uncached(const Interval& a, unsigned k) const;

  Precision prec_;
  bool use_cache_;
};

/// abs_bound without a context: max(-lo, hi), exact.
PreciseFloat abs_bound_exact(const Interval& a);

}  // namespace nlv::numeric
