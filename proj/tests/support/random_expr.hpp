#pragma once

// Random expressions for property tests. Transcendental pieces are wrapped so
// that every generated expression is defined on all of R^n.

#include <random>

#include "nlv/expr/expr.hpp"

namespace nlv::testing {

struct ExprGenerator {
  std::mt19937_64& rng;
  int vars = 2;
  bool transcendental = false;
  int max_depth = 4;

  expr::Expr small_constant() {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    return expr::constant(mpq_class(num(rng), den(rng)));
  }

  expr::Expr leaf() {
    if (rng() % 3 == 0) return small_constant();
    return expr::variable(static_cast<int>(rng() % static_cast<unsigned>(vars)));
  }

  expr::Expr operator()(int depth = 0) {
    if (depth >= max_depth || rng() % 4 == 0) return leaf();
    const unsigned kinds = transcendental ? 10 : 6;
    switch (rng() % kinds) {
      case 0: return (*this)(depth + 1) + (*this)(depth + 1);
      case 1: return (*this)(depth + 1) - (*this)(depth + 1);
      case 2: return (*this)(depth + 1) * (*this)(depth + 1);
      case 3: return -(*this)(depth + 1);
      case 4: return expr::pow((*this)(depth + 1), static_cast<unsigned>(rng() % 4));
      case 5: return (*this)(depth + 1) / (expr::constant(1) + expr::pow((*this)(depth + 1), 2));
      case 6: return expr::sqrt(expr::constant(mpq_class(1, 2)) + expr::pow((*this)(depth + 1), 2));
      case 7: return expr::atan((*this)(depth + 1));
      case 8: {
        const expr::Expr u = (*this)(depth + 1);
        return expr::acos(u / (expr::constant(2) + expr::pow(u, 2)));
      }
      default: return expr::pi() * (*this)(depth + 1);
    }
  }
};

}  // namespace nlv::testing
