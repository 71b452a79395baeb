#pragma once

#include <cstddef>
#include <vector>

#include "nlv/search/box.hpp"
#include "nlv/search/certificate.hpp"
#include "nlv/taylor/taylor.hpp"

namespace nlv::search {

struct SearchParams {
  /// Boxes at this many splits are not subdivided further.
  int max_depth = 80;
  /// Boxes above this depth are split without trying any rule.
  int min_split_depth = 0;
  /// Try monotonicity before the bound checks.
  bool mono_first = false;
  /// Emit PassMono when a monotone face lies inside the root box; when off,
  /// every face is searched directly.
  bool allow_pass_mono = true;
  bool use_convexity = true;
  /// Threads for the parallel search; 1 runs the serial search.
  int workers = 1;
  /// Glue children above this depth become parallel tasks.
  int task_depth = 14;
};

enum class SearchStatus { verified, refuted, inconclusive };

const char* to_string(SearchStatus s);

/// Hardware-double box used by the search.
struct FastBox {
  std::vector<double> lo, hi;
  std::size_t size() const { return lo.size(); }
};

/// Outward conversion; exactly degenerate coordinates map to a single double.
FastBox to_fast_box(const Box& b);

struct SearchStats {
  std::size_t nodes = 0;  // node expansions
  std::size_t passes = 0;
  std::size_t direct_passes = 0;
  std::size_t monos = 0;
  std::size_t pass_monos = 0;
  std::size_t splits = 0;
  std::size_t convex_glues = 0;
  int max_depth_reached = 0;
};

struct SearchOutcome {
  SearchStatus status = SearchStatus::inconclusive;
  /// No fail node iff status is verified.
  Tree tree;
  /// For refuted: a box on which the goal was bounded below by 0. For
  /// inconclusive: the first box left undecided at the depth limit.
  FastBox witness;
  SearchStats stats;
};

/// Branch and bound over the root box with the fast tier. Runs the serial
/// search when params.workers <= 1.
SearchOutcome certificate_search(const taylor::CompiledProblem& problem, const Box& root, const SearchParams& params);
SearchOutcome certificate_search_serial(const taylor::CompiledProblem& problem, const Box& root,
                                        const SearchParams& params);
SearchOutcome certificate_search_parallel(const taylor::CompiledProblem& problem, const Box& root,
                                          const SearchParams& params);

}  // namespace nlv::search
