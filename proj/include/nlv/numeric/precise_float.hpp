#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

namespace nlv::numeric {

/// Fixed base and mantissa length of the rigorous tier.
struct Precision {
  int base = 200;
  int digits = 5;

  friend bool operator==(const Precision&, const Precision&) = default;
};

enum class Rounding { down, up, nearest };

/// A software floating-point number `mantissa * base^exponent`.
///
/// Values are kept canonical: the mantissa is zero or not divisible by the
/// base, so two equal values always have identical representations. Results
/// of rounded operations carry at most `Precision::digits` base-b digits;
/// exact operations (geometry, midpoints) may carry more.
class PreciseFloat {
 public:
  PreciseFloat() = default;

  static PreciseFloat from_integer(long value, int base);
  static PreciseFloat from_parts(mpz_class mantissa, std::int64_t exponent, int base);
  /// Trusts the caller: mantissa is zero or not divisible by base.
  static PreciseFloat from_canonical(long mantissa, std::int64_t exponent, int base);

  bool is_zero() const { return mant_ == 0; }
  int sign() const { return sgn(mant_); }
  const mpz_class& mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }
  /// 0 for a zero that never met a base.
  int base() const { return base_; }

  /// Number of base-b digits of the mantissa (0 for zero).
  std::size_t digit_count() const;
  /// Position one above the leading digit: |x| < base^top().
  std::int64_t top() const { return exp_ + static_cast<std::int64_t>(digit_count()); }

  mpq_class to_rational() const;
  double to_double() const;
  /// Nearest double in the given direction (down: result <= value).
  double to_double(Rounding dir) const;
  std::string to_string(int significant = 12) const;

  friend bool operator==(const PreciseFloat& a, const PreciseFloat& b);
  friend std::strong_ordering operator<=>(const PreciseFloat& a, const PreciseFloat& b);

 private:
  mpz_class mant_{0};
  std::int64_t exp_ = 0;
  int base_ = 0;
};

/// Rounds the exact rational `x` to `prec`; down gives r <= x, up gives r >= x.
PreciseFloat round_rational(const mpq_class& x, const Precision& prec, Rounding dir);
PreciseFloat round(const PreciseFloat& x, const Precision& prec, Rounding dir);

PreciseFloat neg(const PreciseFloat& x);
PreciseFloat abs(const PreciseFloat& x);
PreciseFloat add(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir);
PreciseFloat sub(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir);
PreciseFloat mul(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir);
/// Requires b != 0.
PreciseFloat div(const PreciseFloat& a, const PreciseFloat& b, const Precision& prec, Rounding dir);
/// Requires x >= 0.
PreciseFloat sqrt(const PreciseFloat& x, const Precision& prec, Rounding dir);
/// x^k for x >= 0, every intermediate product rounded in `dir`.
PreciseFloat pow_nonneg(const PreciseFloat& x, unsigned k, const Precision& prec, Rounding dir);

PreciseFloat exact_add(const PreciseFloat& a, const PreciseFloat& b);
PreciseFloat exact_sub(const PreciseFloat& a, const PreciseFloat& b);
/// A point strictly between a and b when a < b; exactly (a+b)/2 for even bases.
PreciseFloat exact_midpoint(const PreciseFloat& a, const PreciseFloat& b);

/// One unit in the last place of a p-digit number of the magnitude of x.
PreciseFloat ulp(const PreciseFloat& x, const Precision& prec);

inline const PreciseFloat& min(const PreciseFloat& a, const PreciseFloat& b) { return b < a ? b : a; }
inline const PreciseFloat& max(const PreciseFloat& a, const PreciseFloat& b) { return a < b ? b : a; }

/// base^k as a big integer, cached per thread.
const mpz_class& base_power(int base, std::size_t k);
std::size_t digits_in_base(const mpz_class& magnitude, int base);

}  // namespace nlv::numeric
