#pragma once

#include <vector>

#include "nlv/expr/expr.hpp"
#include "nlv/numeric/fast.hpp"
#include "nlv/numeric/rigorous.hpp"
#include "nlv/taylor/tape.hpp"

namespace nlv::taylor {

/// A problem with its partial derivatives compiled for repeated evaluation.
struct CompiledProblem {
  expr::Problem problem;
  expr::PartialTable partials;
  Tape value;     // goal
  Tape point;     // goal followed by the gradient, for evaluation at y
  Tape gradient;  // gradient only, for enclosures over a box
  Tape hessian;   // lower triangle, row-major

  explicit CompiledProblem(expr::Problem p);
  int dimension() const { return problem.dimension(); }
};

/// Tape constants bound once for a fixed arithmetic.
template <class Arith>
struct Evaluator {
  using I = typename Arith::interval_type;

  const CompiledProblem* problem;
  Arith arith;
  std::vector<I> value_constants;
  std::vector<I> point_constants;
  std::vector<I> gradient_constants;
  std::vector<I> hessian_constants;

  Evaluator(const CompiledProblem& p, Arith a)
      : problem(&p),
        arith(std::move(a)),
        value_constants(p.value.bind_constants(arith)),
        point_constants(p.point.bind_constants(arith)),
        gradient_constants(p.gradient.bind_constants(arith)),
        hessian_constants(p.hessian.bind_constants(arith)) {}

  I value(const std::vector<I>& box) const { return problem->value.evaluate(arith, value_constants, box).front(); }
  std::vector<I> gradient(const std::vector<I>& box) const {
    return problem->gradient.evaluate(arith, gradient_constants, box);
  }
  std::vector<I> value_and_gradient(const std::vector<I>& box) const {
    return problem->point.evaluate(arith, point_constants, box);
  }
  std::vector<I> hessian(const std::vector<I>& box) const {
    return problem->hessian.evaluate(arith, hessian_constants, box);
  }
};

/// Box [lo, hi] with an expansion point y inside it and half-widths w, where
/// w_i >= max(hi_i - y_i, y_i - lo_i).
template <class T>
struct Domain {
  std::vector<T> lo, hi, y, w;
  std::size_t size() const { return lo.size(); }
};

template <class Arith>
using DomainOf = Domain<typename Arith::scalar_type>;

template <class Arith>
DomainOf<Arith> make_domain(const std::vector<typename Arith::scalar_type>& lo,
                            const std::vector<typename Arith::scalar_type>& hi, const Arith& arith) {
  DomainOf<Arith> d{lo, hi, {}, {}};
  d.y.reserve(lo.size());
  d.w.reserve(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    d.y.push_back(arith.midpoint(lo[i], hi[i]));
    const auto right = arith.sub_up(hi[i], d.y[i]);
    const auto left = arith.sub_up(d.y[i], lo[i]);
    d.w.push_back(right < left ? left : right);
  }
  return d;
}

/// Outward enclosure of the box at the arithmetic's precision.
template <class Arith>
std::vector<typename Arith::interval_type> box_intervals(const DomainOf<Arith>& d, const Arith& arith) {
  std::vector<typename Arith::interval_type> out;
  out.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(arith.hull(d.lo[i], d.hi[i]));
  return out;
}

/// f(y) in f0, grad f(y) in d, and every second partial over the whole box in dd.
template <class Arith>
struct TaylorInterval {
  DomainOf<Arith> domain;
  typename Arith::interval_type f0;
  std::vector<typename Arith::interval_type> d;
  std::vector<typename Arith::interval_type> dd;  // lower triangle

  const typename Arith::interval_type& second(int i, int j) const { return dd[expr::PartialTable::tri(i, j)]; }
};

/// Throws numeric::DomainError when an evaluation leaves its domain.
template <class Arith>
TaylorInterval<Arith> make_taylor_interval(const Evaluator<Arith>& ev, const DomainOf<Arith>& dom) {
  const Arith& a = ev.arith;
  std::vector<typename Arith::interval_type> at_y;
  at_y.reserve(dom.size());
  for (const auto& yi : dom.y) at_y.push_back(a.point(yi));
  std::vector<typename Arith::interval_type> fy = ev.value_and_gradient(at_y);
  TaylorInterval<Arith> ti{dom, fy.front(), {}, {}};
  ti.d.assign(fy.begin() + 1, fy.end());
  ti.dd = ev.hessian(box_intervals(dom, a));
  return ti;
}

/// a >= sum_i w_i |d_i| + 1/2 sum_i w_i (w_i |dd_ii| + 2 sum_{j<i} w_j |dd_ij|), rounded up.
template <class Arith>
typename Arith::scalar_type taylor_radius(const TaylorInterval<Arith>& ti, const Arith& a) {
  const auto& w = ti.domain.w;
  const int n = static_cast<int>(w.size());
  auto b = a.zero();
  auto e = a.zero();
  for (int i = 0; i < n; ++i) {
    b = a.add_up(b, a.mul_up(w[i], a.abs_bound(ti.d[i])));
    auto off = a.zero();
    for (int j = 0; j < i; ++j) off = a.add_up(off, a.mul_up(w[j], a.abs_bound(ti.second(i, j))));
    const auto inner = a.add_up(a.mul_up(w[i], a.abs_bound(ti.second(i, i))), a.twice_up(off));
    e = a.add_up(e, a.mul_up(w[i], inner));
  }
  return a.add_up(b, a.half_up(e));
}

/// h with f(x) <= h for all x in the domain.
template <class Arith>
typename Arith::scalar_type taylor_upper_bound(const TaylorInterval<Arith>& ti, const Arith& a) {
  return a.add_up(ti.f0.hi, taylor_radius(ti, a));
}

/// l with l <= f(x) for all x in the domain.
template <class Arith>
typename Arith::scalar_type taylor_lower_bound(const TaylorInterval<Arith>& ti, const Arith& a) {
  return a.sub_down(ti.f0.lo, taylor_radius(ti, a));
}

/// Enclosure of the i-th partial over the domain: d_i + sum_j [-w_j, w_j] dd_ij.
template <class Arith>
typename Arith::interval_type bound_gradient(const TaylorInterval<Arith>& ti, int i, const Arith& a) {
  auto r = ti.d[static_cast<std::size_t>(i)];
  for (std::size_t j = 0; j < ti.domain.size(); ++j)
    r = a.add(r, a.mul(a.symmetric(ti.domain.w[j]), ti.second(i, static_cast<int>(j))));
  return r;
}

}  // namespace nlv::taylor
