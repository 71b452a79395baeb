#include "nlv/numeric/transcendental.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "nlv/numeric/rigorous.hpp"

namespace nlv::numeric {

namespace {

constexpr int kGuardDigits = 2;

Precision working(const Precision& prec, int extra = kGuardDigits) { return {prec.base, prec.digits + extra}; }

Interval outward(const Interval& r, const Precision& prec) {
  return {round(r.lo, prec, Rounding::down), round(r.hi, prec, Rounding::up)};
}

// Enclosure of atan(t) for a point 0 <= t <= 1 by the alternating series; the
// truncation error is at most the first omitted term t^(2N+1)/(2N+1).
Interval atan_series(const PreciseFloat& t, const RigorousArith& a) {
  if (t.is_zero()) return {t, t};
  const Precision& prec = a.precision();
  const double tv = std::max(t.to_double(), 1e-300);
  const double want = prec.digits * std::log(static_cast<double>(prec.base));
  const int terms = std::max(1, static_cast<int>(std::ceil(want / (2.0 * std::log(1.0 / std::min(tv, 0.5))))) + 1);

  const Interval x = a.point(t);
  const Interval x2 = a.mul(x, x);
  Interval power = x;
  Interval sum = x;
  for (int k = 1; k < terms; ++k) {
    power = a.mul(power, x2);
    const Interval term = a.div(power, a.constant(2 * k + 1));
    sum = (k % 2 == 1) ? a.sub(sum, term) : a.add(sum, term);
  }
  power = a.mul(power, x2);
  const PreciseFloat rest = a.div(power, a.constant(2 * terms + 1)).hi;
  return {a.sub_down(sum.lo, rest), a.add_up(sum.hi, rest)};
}

// atan over T with 0 <= T.lo, T.hi <= 1, using atan t = 2 atan(t / (1 + sqrt(1 + t^2)))
// until the argument is at most 1/4.
Interval atan_unit(Interval t, const RigorousArith& a) {
  const Interval one = a.constant(1);
  unsigned halvings = 0;
  while (t.hi.to_double() > 0.25) {
    const Interval root = a.sqrt(a.add(one, a.mul(t, t)));
    t = a.div(t, a.add(one, root));
    if (t.lo.sign() < 0) t.lo = a.zero();
    ++halvings;
  }
  Interval r{atan_series(t.lo, a).lo, atan_series(t.hi, a).hi};
  if (halvings > 0) r = a.mul(r, a.constant(mpq_class(1u << halvings)));
  return r;
}

Interval atan_nonneg(const PreciseFloat& x, const Precision& prec) {
  const RigorousArith a(working(prec), false);
  const Interval one = a.constant(1);
  // 1 is representable, so rounding x never crosses it.
  if (one.lo < x) {
    const Interval inv = a.div(one, a.point(x));
    const Interval half_pi = a.div(pi_enclosure(a.precision()), a.constant(2));
    return a.sub(half_pi, atan_unit(inv, a));
  }
  return atan_unit(a.point(x), a);
}

Interval machin_pi(const Precision& prec) {
  const RigorousArith a(working(prec, kGuardDigits + 1), false);
  auto atan_inverse = [&](int n) {
    const Interval t = a.div(a.constant(1), a.constant(n));
    return Interval{atan_series(t.lo, a).lo, atan_series(t.hi, a).hi};
  };
  const Interval r = a.sub(a.mul(a.constant(16), atan_inverse(5)), a.mul(a.constant(4), atan_inverse(239)));
  return outward(r, prec);
}

}  // namespace

Interval pi_enclosure(const Precision& prec) {
  thread_local std::map<std::pair<int, int>, Interval> cache;
  const auto key = std::make_pair(prec.base, prec.digits);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Interval r = machin_pi(prec);
  cache.emplace(key, r);
  return r;
}

Interval atan_enclosure(const PreciseFloat& x, const Precision& prec) {
  if (x.is_zero()) return {x, x};
  if (x.sign() < 0) {
    const Interval r = atan_nonneg(neg(x), prec);
    return outward({neg(r.hi), neg(r.lo)}, prec);
  }
  return outward(atan_nonneg(x, prec), prec);
}

Interval acos_enclosure(const PreciseFloat& u, const Precision& prec) {
  const PreciseFloat one = PreciseFloat::from_integer(1, prec.base);
  const PreciseFloat minus_one = neg(one);
  if (u < minus_one || one < u) throw DomainError("acos argument outside [-1, 1]");

  const RigorousArith a(working(prec), false);
  const Precision wp = a.precision();
  // v is representable at wp, so 1 - v and 1 + v are exact whenever |v| < 1.
  auto at_point = [&](const PreciseFloat& v) -> Interval {
    if (v == one) return {a.zero(), a.zero()};
    if (v == minus_one) return pi_enclosure(wp);
    const Interval vi = a.point(v);
    const Interval ratio = a.div(a.sub(a.constant(1), vi), a.add(a.constant(1), vi));
    const Interval root = a.sqrt(ratio);
    const Interval half{atan_enclosure(root.lo, wp).lo, atan_enclosure(root.hi, wp).hi};
    return a.mul(a.constant(2), half);
  };
  const PreciseFloat lo = round(u, wp, Rounding::down);
  const PreciseFloat hi = round(u, wp, Rounding::up);
  if (lo == hi) return outward(at_point(lo), prec);
  // acos is decreasing.
  return outward({at_point(hi).lo, at_point(lo).hi}, prec);
}

}  // namespace nlv::numeric
