#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "nlv/expr/expr.hpp"

namespace nlv::taylor {

/// A set of expressions flattened into one straight-line program. Structurally
/// equal subterms are shared, so derivative sets with heavy common structure
/// evaluate each distinct subterm once.
class Tape {
 public:
  struct Instr {
    expr::Op op;
    std::uint32_t a = 0;  // operand slots
    std::uint32_t b = 0;
    std::uint32_t arg = 0;  // variable index, exponent, or constant index
  };

  explicit Tape(const std::vector<expr::Expr>& outputs);

  const std::vector<Instr>& code() const { return code_; }
  const std::vector<mpq_class>& constants() const { return constants_; }
  const std::vector<std::uint32_t>& outputs() const { return outputs_; }
  std::size_t size() const { return code_.size(); }

  /// Evaluates every output over `box` (one interval per variable) using
  /// `arith` for each operation. `bound` must come from bind_constants on an
  /// arithmetic of the same precision. Domain errors propagate.
  template <class Arith>
  std::vector<typename Arith::interval_type> evaluate(const Arith& arith,
                                                      const std::vector<typename Arith::interval_type>& bound,
                                                      const std::vector<typename Arith::interval_type>& box) const;

  template <class Arith>
  std::vector<typename Arith::interval_type> bind_constants(const Arith& arith) const {
    std::vector<typename Arith::interval_type> out;
    out.reserve(constants_.size());
    for (const mpq_class& q : constants_) out.push_back(arith.constant(q));
    return out;
  }

 private:
  std::vector<Instr> code_;
  std::vector<mpq_class> constants_;
  std::vector<std::uint32_t> outputs_;
};

template <class Arith>
std::vector<typename Arith::interval_type> Tape::evaluate(const Arith& arith,
                                                          const std::vector<typename Arith::interval_type>& bound,
                                                          const std::vector<typename Arith::interval_type>& box) const {
  using I = typename Arith::interval_type;
  std::vector<I> slot(code_.size());
  for (std::size_t k = 0; k < code_.size(); ++k) {
    const Instr& in = code_[k];
    switch (in.op) {
      case expr::Op::constant: slot[k] = bound[in.arg]; break;
      case expr::Op::variable: slot[k] = box.at(in.arg); break;
      case expr::Op::pi: slot[k] = arith.pi(); break;
      case expr::Op::neg: slot[k] = arith.neg(slot[in.a]); break;
      case expr::Op::add: slot[k] = arith.add(slot[in.a], slot[in.b]); break;
      case expr::Op::sub: slot[k] = arith.sub(slot[in.a], slot[in.b]); break;
      case expr::Op::mul: slot[k] = arith.mul(slot[in.a], slot[in.b]); break;
      case expr::Op::div: slot[k] = arith.div(slot[in.a], slot[in.b]); break;
      case expr::Op::pow: slot[k] = arith.pow(slot[in.a], in.arg); break;
      case expr::Op::sqrt: slot[k] = arith.sqrt(slot[in.a]); break;
      case expr::Op::atan: slot[k] = arith.atan(slot[in.a]); break;
      case expr::Op::acos: slot[k] = arith.acos(slot[in.a]); break;
    }
  }
  std::vector<I> out;
  out.reserve(outputs_.size());
  for (std::uint32_t o : outputs_) out.push_back(slot[o]);
  return out;
}

/// Interval image of a single expression.
template <class Arith>
typename Arith::interval_type eval_expr_interval(const expr::Expr& e, const Arith& arith,
                                                 const std::vector<typename Arith::interval_type>& box) {
  const Tape tape({e});
  return tape.evaluate(arith, tape.bind_constants(arith), box).front();
}

}  // namespace nlv::taylor
