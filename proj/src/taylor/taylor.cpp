#include "nlv/taylor/taylor.hpp"

namespace nlv::taylor {

namespace {

std::vector<expr::Expr> point_outputs(const expr::Problem& p, const expr::PartialTable& t) {
  std::vector<expr::Expr> out{p.goal};
  out.insert(out.end(), t.gradient.begin(), t.gradient.end());
  return out;
}

}  // namespace

CompiledProblem::CompiledProblem(expr::Problem p)
    : problem(std::move(p)),
      partials(expr::partials(problem)),
      value({problem.goal}),
      point(point_outputs(problem, partials)),
      gradient(partials.gradient),
      hessian(partials.hessian_lower) {}

}  // namespace nlv::taylor
