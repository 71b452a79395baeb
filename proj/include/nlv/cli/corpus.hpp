#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlv/expr/expr.hpp"

namespace nlv::cli {

enum class Expected { verified, refuted };

struct CorpusEntry {
  std::string name;
  std::string description;
  expr::Problem problem;
  Expected expected = Expected::verified;
  /// Part of the benchmark set (polynomial and Flyspeck inequalities).
  bool benchmark = false;
};

/// Built-in problems: the polynomial benchmarks, Flyspeck inequalities and
/// small regression problems. Names are unique.
std::vector<CorpusEntry> corpus();
std::optional<CorpusEntry> find_corpus_entry(const std::string& name);

/// The tetrahedron determinant Δ(x1, ..., x6) for squared edge lengths.
expr::Expr delta(const std::vector<expr::Expr>& x);
/// ∂Δ/∂x4.
expr::Expr delta4(const std::vector<expr::Expr>& x);
/// Dihedral angle along the first edge for squared edge lengths:
/// π/2 + atan(-Δ4 / sqrt(4 x1 Δ)).
expr::Expr dih_x(const std::vector<expr::Expr>& x);
/// dih_x at the squares of the edge lengths y.
expr::Expr dih_y(const std::vector<expr::Expr>& y);

}  // namespace nlv::cli
