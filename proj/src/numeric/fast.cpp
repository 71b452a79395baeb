#include "nlv/numeric/fast.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlv::numeric {

FastInterval FastArith::constant(const mpq_class& q) const {
  const double d = q.get_d();
  if (mpq_class(d) == q) return {d, d};
  return {down(d), up(d)};
}

namespace {

// Directed roundings of a+b, a*b and a/b. An error-free transformation gives
// the sign of the rounding error, so exact results are not widened. Results
// near the underflow range are widened on both sides.
constexpr double kTiny = 0x1p-960;

double sum_dir(double a, double b, bool upward) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  if (err == 0) return s;
  return (err > 0) == upward ? (upward ? FastArith::up(s) : FastArith::down(s)) : s;
}

double product_dir(double a, double b, bool upward) {
  const double p = a * b;
  if (a == 0 || b == 0) return 0.0;
  if (!std::isfinite(p) || std::fabs(p) < kTiny) return upward ? FastArith::up(p) : FastArith::down(p);
  const double err = std::fma(a, b, -p);
  if (err == 0) return p;
  return (err > 0) == upward ? (upward ? FastArith::up(p) : FastArith::down(p)) : p;
}

double quotient_dir(double a, double b, bool upward) {
  const double q = a / b;
  if (a == 0) return 0.0;
  if (!std::isfinite(q) || std::fabs(q) < kTiny || std::fabs(a) < kTiny)
    return upward ? FastArith::up(q) : FastArith::down(q);
  const double r = std::fma(-q, b, a);  // a - q*b exactly
  if (r == 0) return q;
  const bool above = (r > 0) == (b > 0);  // true quotient exceeds q
  return above == upward ? (upward ? FastArith::up(q) : FastArith::down(q)) : q;
}

double min_of(double a, double b, double c, double d) { return std::min({a, b, c, d}); }
double max_of(double a, double b, double c, double d) { return std::max({a, b, c, d}); }

}  // namespace

FastInterval FastArith::add(const FastInterval& a, const FastInterval& b) const {
  return {sum_dir(a.lo, b.lo, false), sum_dir(a.hi, b.hi, true)};
}

FastInterval FastArith::sub(const FastInterval& a, const FastInterval& b) const {
  return {sum_dir(a.lo, -b.hi, false), sum_dir(a.hi, -b.lo, true)};
}

FastInterval FastArith::mul(const FastInterval& a, const FastInterval& b) const {
  return {min_of(product_dir(a.lo, b.lo, false), product_dir(a.lo, b.hi, false), product_dir(a.hi, b.lo, false),
                 product_dir(a.hi, b.hi, false)),
          max_of(product_dir(a.lo, b.lo, true), product_dir(a.lo, b.hi, true), product_dir(a.hi, b.lo, true),
                 product_dir(a.hi, b.hi, true))};
}

FastInterval FastArith::div(const FastInterval& a, const FastInterval& b) const {
  if (b.lo <= 0.0 && b.hi >= 0.0) throw DomainError("division by an interval containing zero");
  return {min_of(quotient_dir(a.lo, b.lo, false), quotient_dir(a.lo, b.hi, false), quotient_dir(a.hi, b.lo, false),
                 quotient_dir(a.hi, b.hi, false)),
          max_of(quotient_dir(a.lo, b.lo, true), quotient_dir(a.lo, b.hi, true), quotient_dir(a.hi, b.lo, true),
                 quotient_dir(a.hi, b.hi, true))};
}

FastInterval FastArith::pow(const FastInterval& a, unsigned k) const {
  if (k == 0) return {1.0, 1.0};
  if (k == 1) return a;
  const double rel = 1.0 + 2.0 * k * 0x1p-52;
  auto widen_up = [&](double m) { return up(m >= 0 ? m * rel : m / rel); };
  auto widen_down = [&](double m) { return down(m >= 0 ? m / rel : m * rel); };
  const double kd = static_cast<double>(k);
  const double plo = std::pow(a.lo, kd), phi = std::pow(a.hi, kd);
  if (k % 2 == 1) return {widen_down(plo), widen_up(phi)};
  if (a.lo >= 0) return {widen_down(plo), widen_up(phi)};
  if (a.hi <= 0) return {widen_down(phi), widen_up(plo)};
  return {0.0, widen_up(std::max(plo, phi))};
}

FastInterval FastArith::sqrt(const FastInterval& a) const {
  if (a.lo < 0.0) throw DomainError("sqrt of an interval with negative part");
  auto root = [](double x, bool upward) {
    const double r = std::sqrt(x);
    if (x == 0 || !std::isfinite(r) || x < kTiny) return upward ? up(r) : std::max(0.0, down(r));
    const double err = std::fma(-r, r, x);  // x - r*r
    if (err == 0) return r;
    return (err > 0) == upward ? (upward ? up(r) : down(r)) : r;
  };
  return {root(a.lo, false), root(a.hi, true)};
}

FastInterval FastArith::atan(const FastInterval& a) const {
  return {down(down(std::atan(a.lo))), up(up(std::atan(a.hi)))};
}

FastInterval FastArith::acos(const FastInterval& a) const {
  if (a.lo < -1.0 || a.hi > 1.0) throw DomainError("acos argument outside [-1, 1]");
  return {std::max(0.0, down(down(std::acos(a.hi)))), up(up(std::acos(a.lo)))};
}

FastInterval FastArith::pi() const { return {down(std::numbers::pi), up(std::numbers::pi)}; }

}  // namespace nlv::numeric
