#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlv/expr/expr.hpp"
#include "nlv/numeric/precise_float.hpp"
#include "nlv/search/certificate.hpp"

namespace nlv::search {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact rectangle. Splits and faces are computed without rounding, so the
/// checker and the transform agree on every sub-box bit for bit.
struct Box {
  std::vector<numeric::PreciseFloat> lo, hi;

  std::size_t size() const { return lo.size(); }
  bool degenerate(int j) const { return lo[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]; }
  friend bool operator==(const Box&, const Box&) = default;
};

/// The problem's bounds evaluated at `prec` and rounded outward.
/// Throws GeometryError when a lower bound exceeds its upper bound.
Box root_box(const expr::Problem& p, const numeric::Precision& prec);

/// Halves at the exact midpoint of coordinate j; throws GeometryError when
/// coordinate j is degenerate.
std::pair<Box, Box> split_box(const Box& b, int j);
Box restrict_box(const Box& b, int j, Side face);
/// One path step: a split half or a face.
Box step_box(const Box& b, const PathStep& step);
Box apply_path(const Box& root, const Path& path);

/// Closed componentwise inclusion, equality allowed.
bool subset(const Box& inner, const Box& outer);

/// Lowest index among the widest coordinates.
int widest_coordinate(const Box& b);

std::string to_string(const Box& b, int significant = 8);

}  // namespace nlv::search
