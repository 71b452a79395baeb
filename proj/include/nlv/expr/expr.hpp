#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

namespace nlv::expr {

enum class Op : unsigned char { constant, variable, pi, neg, add, sub, mul, div, pow, sqrt, atan, acos };

struct Node;

/// Immutable symbolic expression. Copies share structure; a tree built by the
/// factories below is never mutated, so it can be shared across threads.
class Expr {
 public:
  Expr();  // the constant 0

  Op op() const;
  /// Exact rational value of a constant node.
  const mpq_class& value() const;
  /// Zero-based variable index of a variable node.
  int var() const;
  unsigned exponent() const;
  std::size_t arity() const;
  const Expr& child(std::size_t i) const;

  bool is_constant() const { return op() == Op::constant; }
  bool is_constant(long v) const { return is_constant() && value() == v; }
  /// Stable identity for memoization.
  const Node* id() const { return node_.get(); }

  /// Largest variable index + 1 (0 for constant expressions).
  int num_vars() const;
  std::size_t size() const;

 private:
  friend Expr make_node(Node node);
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::constant;
  mpq_class value;
  int var = -1;
  unsigned exponent = 0;
  std::vector<Expr> children;
};

Expr constant(const mpq_class& q);
Expr constant(long v);
Expr variable(int index);
Expr pi();

// Factories apply only numeral folding and identity/annihilator rules
// (0*e, e+0, e*1, ...). x - x stays x - x.
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& a, unsigned k);
Expr sqrt(const Expr& a);
Expr atan(const Expr& a);
Expr acos(const Expr& a);

bool structurally_equal(const Expr& a, const Expr& b);

/// Partial derivative with respect to variable `index` (zero-based).
Expr differentiate(const Expr& e, int index);

/// Substitutes variable i by replacements[i].
Expr substitute(const Expr& e, const std::vector<Expr>& replacements);

/// Infix rendering in the problem grammar; reparses to a structurally equal tree.
std::string to_string(const Expr& e, const std::vector<std::string>& names);
std::string rational_to_string(const mpq_class& q);

/// Pointwise evaluation in long double (for diagnostics and sampling).
long double evaluate(const Expr& e, const std::vector<long double>& x);

/// ∀x in [lower, upper]: goal(x) < 0.
struct Problem {
  std::vector<std::string> names;
  std::vector<Expr> lower;
  std::vector<Expr> upper;
  Expr goal;

  int dimension() const { return static_cast<int>(names.size()); }
};

std::string to_string(const Problem& p);
bool structurally_equal(const Problem& a, const Problem& b);

/// First and second partial derivatives of a goal. Only the lower triangle of
/// the Hessian is stored; hessian(i, j) reflects for j > i.
struct PartialTable {
  std::vector<Expr> gradient;
  std::vector<Expr> hessian_lower;  // row-major, entry (i, j) with j <= i

  static std::size_t tri(int i, int j) {
    if (j > i) std::swap(i, j);
    return static_cast<std::size_t>(i) * (i + 1) / 2 + static_cast<std::size_t>(j);
  }
  const Expr& hessian(int i, int j) const { return hessian_lower[tri(i, j)]; }
};

PartialTable partials(const Problem& p);

}  // namespace nlv::expr
