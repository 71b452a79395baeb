#include "nlv/numeric/rigorous.hpp"

#include <cstring>

#include "nlv/numeric/op_cache.hpp"
#include "nlv/numeric/transcendental.hpp"

namespace nlv::numeric {

namespace {

enum class OpCode : char { mul = 'm', div = 'd', pow = 'p', sqrt = 's', atan = 'a', acos = 'c' };

std::string make_key(OpCode op, const Precision& prec, unsigned extra, const Interval& a,
                     const Interval* b = nullptr) {
  std::string key;
  key.reserve(96);
  key.push_back(static_cast<char>(op));
  const int header[3] = {prec.base, prec.digits, static_cast<int>(extra)};
  key.append(reinterpret_cast<const char*>(header), sizeof header);
  append_key(key, a.lo);
  append_key(key, a.hi);
  if (b != nullptr) {
    append_key(key, b->lo);
    append_key(key, b->hi);
  }
  return key;
}

template <class F>
Interval memoized(bool enabled, OpCode op, const Precision& prec, unsigned extra, const Interval& a,
                  const Interval* b, F&& compute) {
  if (!enabled) return compute();
  std::string key = make_key(op, prec, extra, a, b);
  OpCache& cache = thread_op_cache();
  if (auto hit = cache.find(key)) return *hit;
  Interval r = compute();
  cache.insert(std::move(key), r);
  return r;
}

bool nonneg(const PreciseFloat& x) { return x.sign() >= 0; }
bool nonpos(const PreciseFloat& x) { return x.sign() <= 0; }

}  // namespace

PreciseFloat abs_bound_exact(const Interval& a) { return max(neg(a.lo), a.hi); }

Interval RigorousArith::constant(const mpq_class& q) const {
  return {round_rational(q, prec_, Rounding::down), round_rational(q, prec_, Rounding::up)};
}

Interval RigorousArith::hull(const PreciseFloat& lo, const PreciseFloat& hi) const {
  return {round(lo, prec_, Rounding::down), round(hi, prec_, Rounding::up)};
}

Interval RigorousArith::neg(const Interval& a) const { return {numeric::neg(a.hi), numeric::neg(a.lo)}; }

Interval RigorousArith::add(const Interval& a, const Interval& b) const {
  return {numeric::add(a.lo, b.lo, prec_, Rounding::down), numeric::add(a.hi, b.hi, prec_, Rounding::up)};
}

Interval RigorousArith::sub(const Interval& a, const Interval& b) const {
  return {numeric::sub(a.lo, b.hi, prec_, Rounding::down), numeric::sub(a.hi, b.lo, prec_, Rounding::up)};
}

Interval RigorousArith::mul(const Interval& a, const Interval& b) const {
  return mul_uncached(a, b);
}

Interval RigorousArith::mul_uncached(const Interval& a, const Interval& b) const {
  auto lo = [&](const PreciseFloat& x, const PreciseFloat& y) { return numeric::mul(x, y, prec_, Rounding::down); };
  auto hi = [&](const PreciseFloat& x, const PreciseFloat& y) { return numeric::mul(x, y, prec_, Rounding::up); };
  const PreciseFloat &a1 = a.lo, &a2 = a.hi, &b1 = b.lo, &b2 = b.hi;
  if (nonneg(a1)) {
    if (nonneg(b1)) return {lo(a1, b1), hi(a2, b2)};
    if (nonpos(b2)) return {lo(a2, b1), hi(a1, b2)};
    return {lo(a2, b1), hi(a2, b2)};
  }
  if (nonpos(a2)) {
    if (nonneg(b1)) return {lo(a1, b2), hi(a2, b1)};
    if (nonpos(b2)) return {lo(a2, b2), hi(a1, b1)};
    return {lo(a1, b2), hi(a1, b1)};
  }
  if (nonneg(b1)) return {lo(a1, b2), hi(a2, b2)};
  if (nonpos(b2)) return {lo(a2, b1), hi(a1, b1)};
  return {min(lo(a1, b2), lo(a2, b1)), max(hi(a1, b1), hi(a2, b2))};
}

Interval RigorousArith::div(const Interval& a, const Interval& b) const {
  if (b.lo.sign() <= 0 && b.hi.sign() >= 0) throw DomainError("division by an interval containing zero");
  return div_uncached(a, b);
}

Interval RigorousArith::div_uncached(const Interval& a, const Interval& b) const {
  if (b.hi.sign() < 0) return neg(div_uncached(a, neg(b)));
  auto lo = [&](const PreciseFloat& x, const PreciseFloat& y) { return numeric::div(x, y, prec_, Rounding::down); };
  auto hi = [&](const PreciseFloat& x, const PreciseFloat& y) { return numeric::div(x, y, prec_, Rounding::up); };
  return {nonneg(a.lo) ? lo(a.lo, b.hi) : lo(a.lo, b.lo), nonneg(a.hi) ? hi(a.hi, b.lo) : hi(a.hi, b.hi)};
}

Interval RigorousArith::pow(const Interval& a, unsigned k) const {
  if (k == 0) return constant(1);
  if (k == 1) return hull(a.lo, a.hi);
  return pow_uncached(a, k);
}

Interval RigorousArith::pow_uncached(const Interval& a, unsigned k) const {
  auto up = [&](const PreciseFloat& x) { return pow_nonneg(x, k, prec_, Rounding::up); };
  auto down = [&](const PreciseFloat& x) { return pow_nonneg(x, k, prec_, Rounding::down); };
  if (k % 2 == 1) {
    PreciseFloat lo = nonneg(a.lo) ? down(a.lo) : numeric::neg(up(numeric::neg(a.lo)));
    PreciseFloat hi = nonneg(a.hi) ? up(a.hi) : numeric::neg(down(numeric::neg(a.hi)));
    return {std::move(lo), std::move(hi)};
  }
  if (nonneg(a.lo)) return {down(a.lo), up(a.hi)};
  if (nonpos(a.hi)) return {down(numeric::neg(a.hi)), up(numeric::neg(a.lo))};
  return {zero(), up(abs_bound_exact(a))};
}

Interval RigorousArith::sqrt(const Interval& a) const {
  if (a.lo.sign() < 0) throw DomainError("sqrt of an interval with negative part");
  return memoized(use_cache_, OpCode::sqrt, prec_, 0, a, nullptr, [&]() -> Interval {
    return {numeric::sqrt(a.lo, prec_, Rounding::down), numeric::sqrt(a.hi, prec_, Rounding::up)};
  });
}

Interval RigorousArith::atan(const Interval& a) const {
  return memoized(use_cache_, OpCode::atan, prec_, 0, a, nullptr, [&]() -> Interval {
    if (a.lo == a.hi) return atan_enclosure(a.lo, prec_);
    return {atan_enclosure(a.lo, prec_).lo, atan_enclosure(a.hi, prec_).hi};
  });
}

Interval RigorousArith::acos(const Interval& a) const {
  const PreciseFloat one = PreciseFloat::from_integer(1, prec_.base);
  if (a.lo < numeric::neg(one) || one < a.hi) throw DomainError("acos argument outside [-1, 1]");
  return memoized(use_cache_, OpCode::acos, prec_, 0, a, nullptr, [&]() -> Interval {
    if (a.lo == a.hi) return acos_enclosure(a.lo, prec_);
    return {acos_enclosure(a.hi, prec_).lo, acos_enclosure(a.lo, prec_).hi};
  });
}

Interval RigorousArith::pi() const { return pi_enclosure(prec_); }

PreciseFloat RigorousArith::add_up(const PreciseFloat& a, const PreciseFloat& b) const {
  return numeric::add(a, b, prec_, Rounding::up);
}

PreciseFloat RigorousArith::sub_down(const PreciseFloat& a, const PreciseFloat& b) const {
  return numeric::sub(a, b, prec_, Rounding::down);
}

PreciseFloat RigorousArith::sub_up(const PreciseFloat& a, const PreciseFloat& b) const {
  return numeric::sub(a, b, prec_, Rounding::up);
}

PreciseFloat RigorousArith::mul_up(const PreciseFloat& a, const PreciseFloat& b) const {
  return numeric::mul(a, b, prec_, Rounding::up);
}

PreciseFloat RigorousArith::half_up(const PreciseFloat& a) const {
  return numeric::div(a, PreciseFloat::from_integer(2, prec_.base), prec_, Rounding::up);
}

PreciseFloat RigorousArith::twice_up(const PreciseFloat& a) const {
  return numeric::mul(a, PreciseFloat::from_integer(2, prec_.base), prec_, Rounding::up);
}

PreciseFloat RigorousArith::abs_bound(const Interval& a) const { return round_up(abs_bound_exact(a)); }

PreciseFloat RigorousArith::midpoint(const PreciseFloat& lo, const PreciseFloat& hi) const {
  PreciseFloat y = round(exact_midpoint(lo, hi), prec_, Rounding::nearest);
  // Rounding can step outside a box narrower than one ulp.
  if (y < lo) return lo;
  if (hi < y) return hi;
  return y;
}

}  // namespace nlv::numeric
