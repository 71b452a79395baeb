#include "nlv/cli/corpus.hpp"

#include "nlv/expr/parser.hpp"

namespace nlv::cli {

using expr::constant;
using expr::Expr;

namespace {

std::vector<Expr> variables(int n) {
  std::vector<Expr> v;
  for (int i = 0; i < n; ++i) v.push_back(expr::variable(i));
  return v;
}

expr::Problem boxed(const std::string& prefix, int n, const Expr& lo, const Expr& hi, Expr goal) {
  expr::Problem p;
  for (int i = 0; i < n; ++i) {
    p.names.push_back(prefix + std::to_string(i + 1));
    p.lower.push_back(lo);
    p.upper.push_back(hi);
  }
  p.goal = std::move(goal);
  return p;
}

Expr dec(const char* text) { return expr::parse_expression(text, {}); }

CorpusEntry parsed(std::string name, std::string description, const char* text, Expected expected, bool benchmark) {
  return {std::move(name), std::move(description), expr::parse_problem(text), expected, benchmark};
}

}  // namespace

Expr delta(const std::vector<Expr>& x) {
  const Expr &x1 = x[0], &x2 = x[1], &x3 = x[2], &x4 = x[3], &x5 = x[4], &x6 = x[5];
  return x1 * x4 * (-x1 + x2 + x3 - x4 + x5 + x6) + x2 * x5 * (x1 - x2 + x3 + x4 - x5 + x6) +
         x3 * x6 * (x1 + x2 - x3 + x4 + x5 - x6) - x2 * x3 * x4 - x1 * x3 * x5 - x1 * x2 * x6 - x4 * x5 * x6;
}

Expr delta4(const std::vector<Expr>& x) {
  // Differentiate a variable-only copy, then substitute the arguments.
  return expr::substitute(expr::differentiate(delta(variables(6)), 3), x);
}

Expr dih_x(const std::vector<Expr>& x) {
  return expr::pi() / constant(2) + expr::atan(-delta4(x) / expr::sqrt(constant(4) * x[0] * delta(x)));
}

Expr dih_y(const std::vector<Expr>& y) {
  std::vector<Expr> sq;
  for (const Expr& v : y) sq.push_back(expr::pow(v, 2));
  return dih_x(sq);
}

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  out.push_back(parsed("schwefel", "Schwefel function lower bound",
                       "-10 <= x1 <= 10; -10 <= x2 <= 10; -10 <= x3 <= 10 |- "
                       "-5.8806e-10 < (x1 - x2^2)^2 + (x2 - 1)^2 + (x1 - x3^2)^2 + (x3 - 1)^2",
                       Expected::verified, true));
  out.push_back(parsed("caprasse", "Caprasse system polynomial",
                       "-0.5 <= x1 <= 0.5; -0.5 <= x2 <= 0.5; -0.5 <= x3 <= 0.5; -0.5 <= x4 <= 0.5 |- "
                       "-3.1801 < -x1*x3^3 + 4*x2*x3^2*x4 + 4*x1*x3*x4^2 + 2*x2*x4^3 + 4*x1*x3 + 4*x3^2 "
                       "- 10*x2*x4 - 10*x4^2 + 2",
                       Expected::verified, true));
  out.push_back(parsed("magnetism", "magnetism polynomial in seven variables",
                       "-1 <= x1 <= 1; -1 <= x2 <= 1; -1 <= x3 <= 1; -1 <= x4 <= 1; -1 <= x5 <= 1; "
                       "-1 <= x6 <= 1; -1 <= x7 <= 1 |- "
                       "-0.25001 < x1^2 + 2*x2^2 + 2*x3^2 + 2*x4^2 + 2*x5^2 + 2*x6^2 + 2*x7^2 - x1",
                       Expected::verified, true));
  out.push_back(parsed("heart", "heart dipole polynomial in eight variables",
                       "-0.1 <= x1 <= 0.4; 0.4 <= x2 <= 1; -0.7 <= x3 <= -0.4; -0.7 <= x4 <= 0.4; "
                       "0.1 <= x5 <= 0.2; -0.1 <= x6 <= 0.2; -0.3 <= x7 <= 1.1; -1.1 <= x8 <= -0.3 |- "
                       "-1.7435 < -x1*x6^3 + 3*x1*x6*x7^2 - x3*x7^3 + 3*x3*x7*x6^2 - x2*x5^3 + 3*x2*x5*x8^2 "
                       "- x4*x8^3 + 3*x4*x8*x5^2 - 0.9563453",
                       Expected::verified, true));
  out.push_back(parsed("two-variable", "polynomial inequality with irrational bounds",
                       "-1/sqrt(3) <= x <= sqrt(2); -sqrt(pi) <= y <= 1 |- "
                       "x^2*y - x*y^4 + y^6 + x^4 - 7 > -7.17995",
                       Expected::verified, true));
  {
    const auto x = variables(6);
    out.push_back({"4717061266", "Flyspeck: delta is positive", boxed("x", 6, constant(4), dec("6.3504"), -delta(x)),
                   Expected::verified, true});
  }
  {
    const auto x = variables(6);
    expr::Problem p = boxed("x", 6, constant(4), dec("6.3504"), dih_x(x) - expr::pi() / constant(2) + dec("0.46"));
    p.upper[3] = constant(4);
    p.lower[4] = p.lower[5] = expr::pow(dec("3.01"), 2);
    p.upper[4] = p.upper[5] = expr::pow(dec("3.24"), 2);
    out.push_back({"7067938795", "Flyspeck: dihedral angle bound", std::move(p), Expected::verified, true});
  }
  {
    const auto y = variables(6);
    const Expr rhs = dih_y(y) - dec("1.629") - dec("0.763") * (y[3] - dec("2.52")) -
                     dec("0.315") * (y[0] - dec("2.0")) + dec("0.414") * (y[1] + y[2] + y[4] + y[5] - dec("8.0"));
    // As stated this is false at y = (2, ..., 2), where the goal is about 1.3e-3.
    out.push_back({"3318775219", "Flyspeck: dihedral angle in edge lengths",
                   boxed("y", 6, constant(2), dec("2.52"), -rhs), Expected::refuted, true});
  }
  out.push_back(parsed("x-minus-x", "dependency problem", "0 <= x <= 1 |- x - x < 1", Expected::verified, false));
  out.push_back(parsed("x-minus-atan", "Taylor bound without subdivision", "0 <= x <= 1 |- x - atan(x) < 1",
                       Expected::verified, false));
  out.push_back(parsed("x-minus-2", "monotone on both halves", "-1 <= x <= 1 |- x - 2 < 0", Expected::verified, false));
  out.push_back(parsed("neg-square", "strict decreasing check", "-1 <= x <= 1 |- -x^2 - 1 < 0", Expected::verified,
                       false));
  out.push_back(parsed("convex-square", "convex in x", "-0.6 <= x <= 0.6 |- x^2 - 0.5 < 0", Expected::verified,
                       false));
  out.push_back(parsed("false-square", "false at x = 2", "0 <= x <= 2 |- x^2 - 1 < 0", Expected::refuted, false));
  out.push_back(parsed("x-negative", "false at x = 1", "0 <= x <= 1 |- x < 0", Expected::refuted, false));
  return out;
}

std::optional<CorpusEntry> find_corpus_entry(const std::string& name) {
  for (CorpusEntry& e : corpus())
    if (e.name == name) return std::move(e);
  return std::nullopt;
}

}  // namespace nlv::cli
