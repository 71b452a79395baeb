#include "nlv/search/box.hpp"

#include "nlv/numeric/rigorous.hpp"
#include "nlv/taylor/tape.hpp"

namespace nlv::search {

using numeric::PreciseFloat;

Box root_box(const expr::Problem& p, const numeric::Precision& prec) {
  const numeric::RigorousArith arith(prec, false);
  Box b;
  for (int i = 0; i < p.dimension(); ++i) {
    const auto lo = taylor::eval_expr_interval(p.lower[static_cast<std::size_t>(i)], arith, {});
    const auto hi = taylor::eval_expr_interval(p.upper[static_cast<std::size_t>(i)], arith, {});
    if (hi.hi < lo.lo) throw GeometryError("empty range for variable '" + p.names[static_cast<std::size_t>(i)] + "'");
    b.lo.push_back(lo.lo);
    b.hi.push_back(hi.hi);
  }
  return b;
}

std::pair<Box, Box> split_box(const Box& b, int j) {
  const auto k = static_cast<std::size_t>(j);
  if (j < 0 || k >= b.size()) throw GeometryError("split coordinate out of range");
  if (!(b.lo[k] < b.hi[k])) throw GeometryError("cannot split a degenerate coordinate");
  const PreciseFloat m = numeric::exact_midpoint(b.lo[k], b.hi[k]);
  std::pair<Box, Box> halves{b, b};
  halves.first.hi[k] = m;
  halves.second.lo[k] = m;
  return halves;
}

Box restrict_box(const Box& b, int j, Side face) {
  const auto k = static_cast<std::size_t>(j);
  if (j < 0 || k >= b.size()) throw GeometryError("face coordinate out of range");
  Box r = b;
  if (face == Side::lo_face) r.hi[k] = r.lo[k];
  else r.lo[k] = r.hi[k];
  return r;
}

Box step_box(const Box& b, const PathStep& step) {
  switch (step.side) {
    case Side::left: return split_box(b, step.coord).first;
    case Side::right: return split_box(b, step.coord).second;
    default: return restrict_box(b, step.coord, step.side);
  }
}

Box apply_path(const Box& root, const Path& path) {
  Box b = root;
  for (const PathStep& s : path) {
    const auto k = static_cast<std::size_t>(s.coord);
    if (s.coord < 0 || k >= b.size()) throw GeometryError("path coordinate out of range");
    switch (s.side) {
      case Side::left:
      case Side::right: {
        if (!(b.lo[k] < b.hi[k])) throw GeometryError("cannot split a degenerate coordinate");
        PreciseFloat m = numeric::exact_midpoint(b.lo[k], b.hi[k]);
        (s.side == Side::left ? b.hi[k] : b.lo[k]) = std::move(m);
        break;
      }
      case Side::lo_face: b.hi[k] = b.lo[k]; break;
      case Side::hi_face: b.lo[k] = b.hi[k]; break;
    }
  }
  return b;
}

bool subset(const Box& inner, const Box& outer) {
  if (inner.size() != outer.size()) return false;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner.lo[i] < outer.lo[i] || outer.hi[i] < inner.hi[i]) return false;
  return true;
}

int widest_coordinate(const Box& b) {
  int best = 0;
  PreciseFloat best_width;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const PreciseFloat w = numeric::exact_sub(b.hi[i], b.lo[i]);
    if (i == 0 || best_width < w) {
      best = static_cast<int>(i);
      best_width = w;
    }
  }
  return best;
}

std::string to_string(const Box& b, int significant) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i > 0) out += 'x';
    out += '[' + b.lo[i].to_string(significant) + ',' + b.hi[i].to_string(significant) + ']';
  }
  return out;
}

}  // namespace nlv::search
