#include "nlv/expr/expr.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace nlv::expr {

Expr make_node(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

namespace {

const Expr& zero_expr() {
  static const Expr zero = make_node(Node{});
  return zero;
}

Expr unary(Op op, const Expr& a) {
  Node n;
  n.op = op;
  n.children = {a};
  return make_node(std::move(n));
}

Expr binary(Op op, const Expr& a, const Expr& b) {
  Node n;
  n.op = op;
  n.children = {a, b};
  return make_node(std::move(n));
}

}  // namespace

Expr::Expr() : node_(zero_expr().node_) {}

Op Expr::op() const { return node_->op; }
const mpq_class& Expr::value() const { return node_->value; }
int Expr::var() const { return node_->var; }
unsigned Expr::exponent() const { return node_->exponent; }
std::size_t Expr::arity() const { return node_->children.size(); }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }

int Expr::num_vars() const {
  int result = 0;
  std::unordered_set<const Node*> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (!seen.insert(e.id()).second) return;
    if (e.op() == Op::variable) result = std::max(result, e.var() + 1);
    for (std::size_t i = 0; i < e.arity(); ++i) walk(e.child(i));
  };
  walk(*this);
  return result;
}

std::size_t Expr::size() const {
  std::unordered_set<const Node*> seen;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (!seen.insert(e.id()).second) return;
    for (std::size_t i = 0; i < e.arity(); ++i) walk(e.child(i));
  };
  walk(*this);
  return seen.size();
}

Expr constant(const mpq_class& q) {
  if (q == 0) return Expr();
  Node n;
  n.op = Op::constant;
  n.value = q;
  n.value.canonicalize();
  return make_node(std::move(n));
}

Expr constant(long v) { return constant(mpq_class(v)); }

Expr variable(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be non-negative");
  Node n;
  n.op = Op::variable;
  n.var = index;
  return make_node(std::move(n));
}

Expr pi() {
  Node n;
  n.op = Op::pi;
  return make_node(std::move(n));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return constant(-a.value());
  if (a.op() == Op::neg) return a.child(0);
  return unary(Op::neg, a);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return constant(a.value() + b.value());
  if (a.is_constant(0)) return b;
  if (b.is_constant(0)) return a;
  return binary(Op::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return constant(a.value() - b.value());
  if (b.is_constant(0)) return a;
  if (a.is_constant(0)) return -b;
  return binary(Op::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return constant(a.value() * b.value());
  if (a.is_constant(0) || b.is_constant(0)) return Expr();
  if (a.is_constant(1)) return b;
  if (b.is_constant(1)) return a;
  return binary(Op::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0) return constant(a.value() / b.value());
  if (b.is_constant(1)) return a;
  if (a.is_constant(0) && !b.is_constant()) return Expr();
  return binary(Op::div, a, b);
}

Expr pow(const Expr& a, unsigned k) {
  if (k == 0) return constant(1);
  if (k == 1) return a;
  if (a.is_constant()) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), a.value().get_num_mpz_t(), k);
    mpz_pow_ui(den.get_mpz_t(), a.value().get_den_mpz_t(), k);
    return constant(mpq_class(num, den));
  }
  Node n;
  n.op = Op::pow;
  n.exponent = k;
  n.children = {a};
  return make_node(std::move(n));
}

Expr sqrt(const Expr& a) { return unary(Op::sqrt, a); }
Expr atan(const Expr& a) { return unary(Op::atan, a); }
Expr acos(const Expr& a) { return unary(Op::acos, a); }

bool structurally_equal(const Expr& a, const Expr& b) {
  std::map<std::pair<const Node*, const Node*>, bool> memo;
  std::function<bool(const Expr&, const Expr&)> eq = [&](const Expr& x, const Expr& y) -> bool {
    if (x.id() == y.id()) return true;
    const auto key = std::make_pair(x.id(), y.id());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool same = x.op() == y.op() && x.arity() == y.arity();
    if (same) {
      switch (x.op()) {
        case Op::constant: same = x.value() == y.value(); break;
        case Op::variable: same = x.var() == y.var(); break;
        case Op::pow: same = x.exponent() == y.exponent(); break;
        default: break;
      }
    }
    for (std::size_t i = 0; same && i < x.arity(); ++i) same = eq(x.child(i), y.child(i));
    memo[key] = same;
    return same;
  };
  return eq(a, b);
}

Expr differentiate(const Expr& e, int index) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> d = [&](const Expr& u) -> Expr {
    if (auto it = memo.find(u.id()); it != memo.end()) return it->second;
    Expr r;
    switch (u.op()) {
      case Op::constant:
      case Op::pi:
        r = constant(0);
        break;
      case Op::variable:
        r = constant(u.var() == index ? 1 : 0);
        break;
      case Op::neg:
        r = -d(u.child(0));
        break;
      case Op::add:
        r = d(u.child(0)) + d(u.child(1));
        break;
      case Op::sub:
        r = d(u.child(0)) - d(u.child(1));
        break;
      case Op::mul: {
        const Expr &a = u.child(0), &b = u.child(1);
        r = d(a) * b + a * d(b);
        break;
      }
      case Op::div: {
        const Expr &a = u.child(0), &b = u.child(1);
        const Expr da = d(a), db = d(b);
        if (db.is_constant(0))
          r = da / b;
        else if (da.is_constant(0))
          r = -((a * db) / pow(b, 2));
        else
          r = (da * b - a * db) / pow(b, 2);
        break;
      }
      case Op::pow: {
        const unsigned k = u.exponent();
        r = constant(static_cast<long>(k)) * pow(u.child(0), k - 1) * d(u.child(0));
        break;
      }
      case Op::sqrt:
        r = d(u.child(0)) / (constant(2) * u);
        break;
      case Op::atan:
        r = d(u.child(0)) / (constant(1) + pow(u.child(0), 2));
        break;
      case Op::acos:
        r = -d(u.child(0)) / sqrt(constant(1) - pow(u.child(0), 2));
        break;
    }
    memo.emplace(u.id(), r);
    return r;
  };
  return d(e);
}

Expr substitute(const Expr& e, const std::vector<Expr>& replacements) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> s = [&](const Expr& u) -> Expr {
    if (auto it = memo.find(u.id()); it != memo.end()) return it->second;
    Expr r;
    switch (u.op()) {
      case Op::constant:
      case Op::pi: r = u; break;
      case Op::variable: r = replacements.at(static_cast<std::size_t>(u.var())); break;
      case Op::neg: r = -s(u.child(0)); break;
      case Op::add: r = s(u.child(0)) + s(u.child(1)); break;
      case Op::sub: r = s(u.child(0)) - s(u.child(1)); break;
      case Op::mul: r = s(u.child(0)) * s(u.child(1)); break;
      case Op::div: r = s(u.child(0)) / s(u.child(1)); break;
      case Op::pow: r = pow(s(u.child(0)), u.exponent()); break;
      case Op::sqrt: r = sqrt(s(u.child(0))); break;
      case Op::atan: r = atan(s(u.child(0))); break;
      case Op::acos: r = acos(s(u.child(0))); break;
    }
    memo.emplace(u.id(), r);
    return r;
  };
  return s(e);
}

std::string rational_to_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  // Terminating decimals print as decimals.
  mpz_class den = q.get_den();
  unsigned twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) return q.get_num().get_str() + "/" + q.get_den().get_str();
  const unsigned places = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  const mpz_class scaled = q.get_num() * (scale / q.get_den());
  std::string digits = mpz_class(abs(scaled)).get_str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return (sgn(scaled) < 0 ? "-" : "") + digits;
}

namespace {

int level(const Expr& e) {
  switch (e.op()) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::constant: {
      if (rational_to_string(e.value()).find('/') != std::string::npos) return 2;
      return sgn(e.value()) < 0 ? 3 : 5;
    }
    default: return 5;
  }
}

std::string render(const Expr& e, const std::vector<std::string>& names) {
  auto wrap = [&](const Expr& c, bool parens) {
    const std::string s = render(c, names);
    return parens ? "(" + s + ")" : s;
  };
  switch (e.op()) {
    case Op::constant: return rational_to_string(e.value());
    case Op::variable: {
      const auto i = static_cast<std::size_t>(e.var());
      return i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    }
    case Op::pi: return "pi";
    case Op::neg: return "-" + wrap(e.child(0), level(e.child(0)) < 3);
    case Op::add: return wrap(e.child(0), false) + " + " + wrap(e.child(1), level(e.child(1)) <= 1);
    case Op::sub: return wrap(e.child(0), false) + " - " + wrap(e.child(1), level(e.child(1)) <= 1);
    case Op::mul: return wrap(e.child(0), level(e.child(0)) < 2) + "*" + wrap(e.child(1), level(e.child(1)) <= 2);
    case Op::div: return wrap(e.child(0), level(e.child(0)) < 2) + "/" + wrap(e.child(1), level(e.child(1)) <= 2);
    case Op::pow: return wrap(e.child(0), level(e.child(0)) < 5) + "^" + std::to_string(e.exponent());
    case Op::sqrt: return "sqrt(" + render(e.child(0), names) + ")";
    case Op::atan: return "atan(" + render(e.child(0), names) + ")";
    case Op::acos: return "acos(" + render(e.child(0), names) + ")";
  }
  return {};
}

}  // namespace

std::string to_string(const Expr& e, const std::vector<std::string>& names) { return render(e, names); }

long double evaluate(const Expr& e, const std::vector<long double>& x) {
  std::unordered_map<const Node*, long double> memo;
  std::function<long double(const Expr&)> ev = [&](const Expr& u) -> long double {
    if (auto it = memo.find(u.id()); it != memo.end()) return it->second;
    long double r = 0;
    switch (u.op()) {
      case Op::constant:
        r = static_cast<long double>(u.value().get_num().get_d()) /
            static_cast<long double>(u.value().get_den().get_d());
        break;
      case Op::variable: r = x.at(static_cast<std::size_t>(u.var())); break;
      case Op::pi: r = 3.141592653589793238462643383279502884L; break;
      case Op::neg: r = -ev(u.child(0)); break;
      case Op::add: r = ev(u.child(0)) + ev(u.child(1)); break;
      case Op::sub: r = ev(u.child(0)) - ev(u.child(1)); break;
      case Op::mul: r = ev(u.child(0)) * ev(u.child(1)); break;
      case Op::div: r = ev(u.child(0)) / ev(u.child(1)); break;
      case Op::pow: {
        const long double b = ev(u.child(0));
        r = 1;
        for (unsigned i = 0; i < u.exponent(); ++i) r *= b;
        break;
      }
      case Op::sqrt: r = std::sqrt(ev(u.child(0))); break;
      case Op::atan: r = std::atan(ev(u.child(0))); break;
      case Op::acos: r = std::acos(ev(u.child(0))); break;
    }
    memo.emplace(u.id(), r);
    return r;
  };
  return ev(e);
}

std::string to_string(const Problem& p) {
  std::string out;
  for (int i = 0; i < p.dimension(); ++i) {
    if (i > 0) out += "; ";
    out += to_string(p.lower[i], p.names) + " <= " + p.names[i] + " <= " + to_string(p.upper[i], p.names);
  }
  out += " |- " + to_string(p.goal, p.names) + " < 0";
  return out;
}

bool structurally_equal(const Problem& a, const Problem& b) {
  if (a.names != b.names || !structurally_equal(a.goal, b.goal)) return false;
  for (int i = 0; i < a.dimension(); ++i)
    if (!structurally_equal(a.lower[i], b.lower[i]) || !structurally_equal(a.upper[i], b.upper[i])) return false;
  return true;
}

PartialTable partials(const Problem& p) {
  PartialTable t;
  const int n = p.dimension();
  t.gradient.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.gradient.push_back(differentiate(p.goal, i));
  t.hessian_lower.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) t.hessian_lower.push_back(differentiate(t.gradient[i], j));
  return t;
}

}  // namespace nlv::expr
