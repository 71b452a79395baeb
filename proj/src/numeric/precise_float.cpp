#include "nlv/numeric/precise_float.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace nlv::numeric {

namespace {

void canonicalize(mpz_class& m, std::int64_t& e, int base) {
  if (m == 0) {
    e = 0;
    return;
  }
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(base))) {
    mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(base));
    ++e;
  }
}

int common_base(const PreciseFloat& a, const PreciseFloat& b) {
  if (a.base() == 0) return b.base();
  if (b.base() != 0 && b.base() != a.base())
    throw std::invalid_argument("PreciseFloat: mixing bases " + std::to_string(a.base()) +
                                " and " + std::to_string(b.base()));
  return a.base();
}

// Rounds the magnitude `mag + sticky*eps` (0 < eps < 1) scaled by base^exp to
// prec.digits digits. `negative` is the sign of the represented value.
PreciseFloat round_magnitude(bool negative, mpz_class mag, std::int64_t exp, bool sticky,
                             const Precision& prec, Rounding dir) {
  const int base = prec.base;
  if (mag == 0 && !sticky) return PreciseFloat::from_parts(0, 0, base);

  const std::size_t d = mag == 0 ? 0 : digits_in_base(mag, base);
  const std::size_t p = static_cast<std::size_t>(prec.digits);
  std::size_t shift = d > p ? d - p : 0;
  mpz_class rem = 0;
  if (shift > 0) {
    const mpz_class& scale = base_power(base, shift);
    mpz_tdiv_qr(mag.get_mpz_t(), rem.get_mpz_t(), mag.get_mpz_t(), scale.get_mpz_t());
  }
  const bool inexact = sticky || rem != 0;
  if (inexact) {
    bool away = false;
    switch (dir) {
      case Rounding::up:
        away = !negative;
        break;
      case Rounding::down:
        away = negative;
        break;
      case Rounding::nearest: {
        if (shift == 0) break;
        const mpz_class twice = 2 * rem;
        const int c = cmp(twice, base_power(base, shift));
        away = c > 0 || (c == 0 && (sticky || mpz_odd_p(mag.get_mpz_t())));
        break;
      }
    }
    if (away) mag += 1;
  }
  if (negative) mag = -mag;
  return PreciseFloat::from_parts(std::move(mag), exp + static_cast<std::int64_t>(shift), base);
}

// Machine-integer path for operands and results whose mantissas fit in 63
// bits. Intermediates (products, aligned sums) fit in 127 bits.
using u128 = unsigned __int128;

struct SmallPowers {
  int base = 0;
  int count = 0;  // powers[k] < 2^127 for k < count
  u128 powers[128];
  int max_digits = 0;  // largest p with base^p < 2^63
};

const SmallPowers& small_powers(int base) {
  thread_local SmallPowers cache[4];
  thread_local int next = 0;
  for (auto& c : cache)
    if (c.base == base) return c;
  SmallPowers& t = cache[next];
  next = (next + 1) % 4;
  t.base = base;
  t.count = 0;
  const u128 limit = u128(1) << 127;
  u128 v = 1;
  while (true) {
    t.powers[t.count++] = v;
    if (v > limit / static_cast<unsigned>(base)) break;
    v *= static_cast<unsigned>(base);
  }
  t.max_digits = 0;
  while (t.max_digits + 1 < t.count && t.powers[t.max_digits + 1] < (u128(1) << 63)) ++t.max_digits;
  return t;
}

int bit_length(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 128 - __builtin_clzll(hi);
  const auto lo = static_cast<std::uint64_t>(v);
  return lo == 0 ? 0 : 64 - __builtin_clzll(lo);
}

bool fits_small(const mpz_class& m) { return mpz_fits_slong_p(m.get_mpz_t()) != 0; }

std::uint64_t magnitude64(const mpz_class& m) {
  const long v = m.get_si();
  return v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

// Same contract as round_magnitude; requires prec.digits <= t.max_digits.
PreciseFloat round_small(bool negative, u128 mag, std::int64_t exp, bool sticky,
                         const SmallPowers& t, const Precision& prec, Rounding dir) {
  if (mag == 0 && !sticky) return PreciseFloat::from_parts(0, 0, prec.base);
  int d = 0;
  while (d < t.count && mag >= t.powers[d]) ++d;
  const int p = prec.digits;
  const int shift = d > p ? d - p : 0;
  u128 rem = 0;
  if (shift > 0) {
    rem = mag % t.powers[shift];
    mag /= t.powers[shift];
  }
  if (sticky || rem != 0) {
    bool away = false;
    switch (dir) {
      case Rounding::up:
        away = !negative;
        break;
      case Rounding::down:
        away = negative;
        break;
      case Rounding::nearest: {
        if (shift == 0) break;
        const u128 other = t.powers[shift] - rem;
        away = rem > other || (rem == other && (sticky || (mag & 1) != 0));
        break;
      }
    }
    if (away) mag += 1;
  }
  auto m = static_cast<std::uint64_t>(mag);
  std::int64_t e = exp + shift;
  const auto b = static_cast<std::uint64_t>(prec.base);
  while (m != 0 && m % b == 0) {
    m /= b;
    ++e;
  }
  const auto sm = static_cast<long>(m);
  return PreciseFloat::from_canonical(negative ? -sm : sm, e, prec.base);
}

}  // namespace

namespace {

struct PowerTable {
  int base = 0;
  double log_base = 0;
  std::deque<mpz_class> powers;
};

PowerTable& power_table(int base) {
  thread_local std::unordered_map<int, PowerTable> tables;
  thread_local PowerTable* last = nullptr;
  if (last && last->base == base) return *last;
  PowerTable& t = tables[base];
  if (t.powers.empty()) {
    t.base = base;
    t.log_base = std::log2(static_cast<double>(base));
    t.powers.emplace_back(1);
  }
  last = &t;
  return t;
}

const mpz_class& power_in(PowerTable& t, std::size_t k) {
  while (t.powers.size() <= k) t.powers.emplace_back(t.powers.back() * t.base);
  return t.powers[k];
}

}  // namespace

const mpz_class& base_power(int base, std::size_t k) { return power_in(power_table(base), k); }

std::size_t digits_in_base(const mpz_class& magnitude, int base) {
  if (magnitude == 0) return 0;
  PowerTable& t = power_table(base);
  const std::size_t bits = mpz_sizeinbase(magnitude.get_mpz_t(), 2);
  auto est = static_cast<std::size_t>(static_cast<double>(bits - 1) / t.log_base) + 1;
  while (mpz_cmpabs(magnitude.get_mpz_t(), power_in(t, est).get_mpz_t()) >= 0) ++est;
  while (est > 1 && mpz_cmpabs(magnitude.get_mpz_t(), power_in(t, est - 1).get_mpz_t()) < 0) --est;
  return est;
}

PreciseFloat PreciseFloat::from_integer(long value, int base) {
  return from_parts(mpz_class(value), 0, base);
}

PreciseFloat PreciseFloat::from_canonical(long mantissa, std::int64_t exponent, int base) {
  PreciseFloat r;
  r.base_ = base;
  r.mant_ = mantissa;
  r.exp_ = mantissa == 0 ? 0 : exponent;
  return r;
}

PreciseFloat PreciseFloat::from_parts(mpz_class mantissa, std::int64_t exponent, int base) {
  if (base < 2) throw std::invalid_argument("PreciseFloat: base must be >= 2");
  PreciseFloat r;
  r.base_ = base;
  r.mant_ = std::move(mantissa);
  r.exp_ = exponent;
  canonicalize(r.mant_, r.exp_, base);
  return r;
}

std::size_t PreciseFloat::digit_count() const { return digits_in_base(mant_, base_ == 0 ? 2 : base_); }

mpq_class PreciseFloat::to_rational() const {
  if (is_zero()) return 0;
  if (exp_ >= 0) return mpq_class(mant_ * base_power(base_, static_cast<std::size_t>(exp_)));
  mpq_class q(mant_, base_power(base_, static_cast<std::size_t>(-exp_)));
  q.canonicalize();
  return q;
}

double PreciseFloat::to_double() const {
  if (is_zero()) return 0.0;
  double m = mant_.get_d();
  return m * std::pow(static_cast<double>(base_), static_cast<double>(exp_));
}

double PreciseFloat::to_double(Rounding dir) const {
  if (is_zero()) return 0.0;
  const mpq_class q = to_rational();
  double d = q.get_d();  // truncates toward zero
  if (dir == Rounding::nearest) return d;
  const int c = cmp(mpq_class(d), q);
  if (dir == Rounding::down && c > 0) d = std::nextafter(d, -HUGE_VAL);
  if (dir == Rounding::up && c < 0) d = std::nextafter(d, HUGE_VAL);
  return d;
}

std::string PreciseFloat::to_string(int significant) const {
  if (is_zero()) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, to_rational().get_d());
  return buf;
}

bool operator==(const PreciseFloat& a, const PreciseFloat& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  return a.exp_ == b.exp_ && a.mant_ == b.mant_ && a.base_ == b.base_;
}

std::strong_ordering operator<=>(const PreciseFloat& a, const PreciseFloat& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const int base = common_base(a, b);
  // Same nonzero sign: compare magnitudes, then flip for negatives.
  std::strong_ordering mag = std::strong_ordering::equal;
  const std::int64_t ta = a.top();
  const std::int64_t tb = b.top();
  if (ta != tb) {
    mag = ta <=> tb;
  } else {
    const std::int64_t e = std::min(a.exp_, b.exp_);
    const mpz_class ma = abs(a.mant_) * base_power(base, static_cast<std::size_t>(a.exp_ - e));
    const mpz_class mb = abs(b.mant_) * base_power(base, static_cast<std::size_t>(b.exp_ - e));
    mag = cmp(ma, mb) <=> 0;
  }
  if (sa > 0) return mag;
  return 0 <=> mag;
}

PreciseFloat round_rational(const mpq_class& x, const Precision& prec, Rounding dir) {
  if (x == 0) return PreciseFloat::from_parts(0, 0, prec.base);
  const bool negative = sgn(x) < 0;
  const mpz_class num = abs(x.get_num());
  const mpz_class& den = x.get_den();
  const auto dn = static_cast<std::int64_t>(digits_in_base(num, prec.base));
  const auto dd = static_cast<std::int64_t>(digits_in_base(den, prec.base));
  // Quotient carries at least digits + 2 digits, so `rem` acts as a sticky bit.
  const std::int64_t e = dn - dd - prec.digits - 2;
  mpz_class n = num;
  mpz_class d = den;
  if (e < 0)
    n *= base_power(prec.base, static_cast<std::size_t>(-e));
  else
    d *= base_power(prec.base, static_cast<std::size_t>(e));
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (dir == Rounding::nearest && r != 0) {
    // The sticky bit cannot settle halfway cases in odd bases; compare exactly.
    PreciseFloat lo = round_magnitude(negative, q, e, true, prec, Rounding::down);
    PreciseFloat hi = round_magnitude(negative, q, e, true, prec, Rounding::up);
    return abs(x - hi.to_rational()) < abs(x - lo.to_rational()) ? hi : lo;
  }
  return round_magnitude(negative, std::move(q), e, r != 0, prec, dir);
}

PreciseFloat round(const PreciseFloat& x, const Precision& prec, Rounding dir) {
  if (x.is_zero()) return PreciseFloat::from_parts(0, 0, prec.base);
  if (x.base() != prec.base) throw std::invalid_argument("round: base mismatch");
  if (x.digit_count() <= static_cast<std::size_t>(prec.digits)) return x;
  return round_magnitude(x.sign() < 0, abs(x.mantissa()), x.exponent(), false, prec, dir);
}

PreciseFloat neg(const PreciseFloat& x) {
  if (x.is_zero()) return x;
  return PreciseFloat::from_parts(-x.mantissa(), x.exponent(), x.base());
}

PreciseFloat abs(const PreciseFloat& x) { return x.sign() < 0 ? neg(x) : x; }

PreciseFloat add(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir) {
  if (a.is_zero()) return round(b, prec, dir);
  if (b.is_zero()) return round(a, prec, dir);
  const int base = common_base(a, b);
  const PreciseFloat& hi = a.exponent() >= b.exponent() ? a : b;
  const PreciseFloat& lo = a.exponent() >= b.exponent() ? b : a;

  const SmallPowers& t = small_powers(base);
  if (prec.digits <= t.max_digits && fits_small(hi.mantissa()) && fits_small(lo.mantissa())) {
    const auto gap = hi.exponent() - lo.exponent();
    const std::uint64_t mh = magnitude64(hi.mantissa());
    if (gap < t.count && bit_length(mh) + bit_length(t.powers[gap]) <= 126) {
      const u128 h = mh * t.powers[gap];
      const u128 l = magnitude64(lo.mantissa());
      const bool hneg = hi.sign() < 0;
      if (hi.sign() == lo.sign()) return round_small(hneg, h + l, lo.exponent(), false, t, prec, dir);
      if (h >= l) return round_small(hneg, h - l, lo.exponent(), false, t, prec, dir);
      return round_small(!hneg, l - h, lo.exponent(), false, t, prec, dir);
    }
  }

  // When `lo` sits entirely below the guard digits of `hi`, only its sign matters.
  const auto dh = static_cast<std::int64_t>(hi.digit_count());
  const std::int64_t guard = std::max<std::int64_t>(0, prec.digits + 2 - dh);
  if (lo.top() <= hi.exponent() - guard - 1) {
    mpz_class n = abs(hi.mantissa()) * base_power(base, static_cast<std::size_t>(guard + 1));
    if (lo.sign() != hi.sign()) n -= 1;
    return round_magnitude(hi.sign() < 0, std::move(n), hi.exponent() - guard - 1, true, prec, dir);
  }
  const auto gap = static_cast<std::size_t>(hi.exponent() - lo.exponent());
  mpz_class m = hi.mantissa() * base_power(base, gap) + lo.mantissa();
  const bool negative = sgn(m) < 0;
  return round_magnitude(negative, abs(m), lo.exponent(), false, prec, dir);
}

PreciseFloat sub(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir) {
  return add(a, neg(b), prec, dir);
}

PreciseFloat mul(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir) {
  if (a.is_zero() || b.is_zero()) return PreciseFloat::from_parts(0, 0, prec.base);
  const int base = common_base(a, b);
  const SmallPowers& t = small_powers(base);
  if (prec.digits <= t.max_digits && fits_small(a.mantissa()) && fits_small(b.mantissa())) {
    const u128 m = u128(magnitude64(a.mantissa())) * magnitude64(b.mantissa());
    return round_small(a.sign() != b.sign(), m, a.exponent() + b.exponent(), false, t, prec, dir);
  }
  mpz_class m = a.mantissa() * b.mantissa();
  const bool negative = sgn(m) < 0;
  return round_magnitude(negative, abs(m), a.exponent() + b.exponent(), false, prec, dir);
}

PreciseFloat div(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir) {
  if (b.is_zero()) throw std::domain_error("PreciseFloat: division by zero");
  if (a.is_zero()) return PreciseFloat::from_parts(0, 0, prec.base);
  const int base = common_base(a, b);
  const auto da = static_cast<std::int64_t>(a.digit_count());
  const auto db = static_cast<std::int64_t>(b.digit_count());
  const std::int64_t s = std::max<std::int64_t>(0, prec.digits + 1 - da + db);
  mpz_class n = abs(a.mantissa()) * base_power(base, static_cast<std::size_t>(s));
  mpz_class q, r;
  const mpz_class d = abs(b.mantissa());
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  const bool negative = a.sign() != b.sign();
  return round_magnitude(negative, std::move(q), a.exponent() - b.exponent() - s, r != 0, prec, dir);
}

PreciseFloat sqrt(const PreciseFloat& x, const Precision& prec, Rounding dir) {
  if (x.sign() < 0) throw std::domain_error("PreciseFloat: sqrt of negative number");
  if (x.is_zero()) return PreciseFloat::from_parts(0, 0, prec.base);
  const auto dx = static_cast<std::int64_t>(x.digit_count());
  std::int64_t s = std::max<std::int64_t>(0, 2 * prec.digits + 2 - dx);
  if ((x.exponent() - s) % 2 != 0) ++s;
  const mpz_class m = x.mantissa() * base_power(x.base(), static_cast<std::size_t>(s));
  mpz_class root, rem;
  mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), m.get_mpz_t());
  return round_magnitude(false, std::move(root), (x.exponent() - s) / 2, rem != 0, prec, dir);
}

PreciseFloat pow_nonneg(const PreciseFloat& x, unsigned k, const Precision& prec, Rounding dir) {
  assert(x.sign() >= 0);
  PreciseFloat result = PreciseFloat::from_integer(1, prec.base);
  PreciseFloat square = round(x, prec, dir);
  bool first = true;
  while (k > 0) {
    if (k & 1u) {
      result = first ? square : mul(result, square, prec, dir);
      first = false;
    }
    k >>= 1u;
    if (k > 0) square = mul(square, square, prec, dir);
  }
  return result;
}

PreciseFloat exact_add(const PreciseFloat& a, const PreciseFloat& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int base = common_base(a, b);
  const std::int64_t e = std::min(a.exponent(), b.exponent());
  mpz_class m = a.mantissa() * base_power(base, static_cast<std::size_t>(a.exponent() - e)) +
                b.mantissa() * base_power(base, static_cast<std::size_t>(b.exponent() - e));
  return PreciseFloat::from_parts(std::move(m), e, base);
}

PreciseFloat exact_sub(const PreciseFloat& a, const PreciseFloat& b) { return exact_add(a, neg(b)); }

PreciseFloat exact_midpoint(const PreciseFloat& a, const PreciseFloat& b) {
  const PreciseFloat s = exact_add(a, b);
  if (s.is_zero()) return s;
  const int base = s.base();
  if (base % 2 == 0)
    return PreciseFloat::from_parts(s.mantissa() * (base / 2), s.exponent() - 1, base);
  if (mpz_even_p(s.mantissa().get_mpz_t()))
    return PreciseFloat::from_parts(s.mantissa() / 2, s.exponent(), base);
  const Precision fine{base, static_cast<int>(s.digit_count()) + 2};
  return div(s, PreciseFloat::from_integer(2, base), fine, Rounding::nearest);
}

PreciseFloat ulp(const PreciseFloat& x, const Precision& prec) {
  const std::int64_t top = x.is_zero() ? 0 : x.top();
  return PreciseFloat::from_parts(1, top - prec.digits, prec.base);
}

}  // namespace nlv::numeric
