#include "nlv/search/search.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>

namespace nlv::search {

using numeric::FastArith;
using numeric::FastInterval;

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::verified: return "verified";
    case SearchStatus::refuted: return "refuted";
    case SearchStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

FastBox to_fast_box(const Box& b) {
  FastBox f;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.lo[i] == b.hi[i]) {
      const double v = b.lo[i].to_double(numeric::Rounding::nearest);
      f.lo.push_back(v);
      f.hi.push_back(v);
    } else {
      f.lo.push_back(b.lo[i].to_double(numeric::Rounding::down));
      f.hi.push_back(b.hi[i].to_double(numeric::Rounding::up));
    }
  }
  return f;
}

namespace {

struct Analysis {
  std::optional<FastInterval> direct;
  std::optional<taylor::TaylorInterval<FastArith>> ti;
  double upper = 0, lower = 0;
};

struct Counters {
  std::atomic<std::size_t> nodes{0}, passes{0}, direct_passes{0}, monos{0}, pass_monos{0}, splits{0}, convex{0};
  std::atomic<int> max_depth{0};
};

class Searcher {
 public:
  Searcher(const taylor::CompiledProblem& cp, const Box& root, const SearchParams& params, bool parallel)
      : ev_(cp, FastArith{}), params_(params), root_(to_fast_box(root)), parallel_(parallel) {}

  SearchOutcome run() {
    SearchOutcome out;
    if (parallel_) {
      Tree t;
#pragma omp parallel num_threads(std::max(1, params_.workers))
#pragma omp single
      t = node(root_, 0);
      out.tree = t;
    } else {
      out.tree = node(root_, 0);
    }
    out.status = refuted_ ? SearchStatus::refuted
                 : out.tree->kind == NodeKind::fail ? SearchStatus::inconclusive
                                                    : SearchStatus::verified;
    if (witness_) out.witness = *witness_;
    out.stats.nodes = counters_.nodes;
    out.stats.passes = counters_.passes;
    out.stats.direct_passes = counters_.direct_passes;
    out.stats.monos = counters_.monos;
    out.stats.pass_monos = counters_.pass_monos;
    out.stats.splits = counters_.splits;
    out.stats.convex_glues = counters_.convex;
    out.stats.max_depth_reached = counters_.max_depth;
    return out;
  }

 private:
  Analysis analyse(const FastBox& box) const {
    const FastArith& a = ev_.arith;
    Analysis an;
    std::vector<FastInterval> iv(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) iv[i] = {box.lo[i], box.hi[i]};
    try {
      an.direct = ev_.value(iv);
    } catch (const numeric::DomainError&) {
    }
    try {
      an.ti = taylor::make_taylor_interval(ev_, taylor::make_domain(box.lo, box.hi, a));
      const double r = taylor::taylor_radius(*an.ti, a);
      an.upper = a.add_up(an.ti->f0.hi, r);
      an.lower = a.sub_down(an.ti->f0.lo, r);
    } catch (const numeric::DomainError&) {
      an.ti.reset();
    }
    return an;
  }

  void record_witness(const FastBox& box) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!witness_) witness_ = box;
  }

  // Pass, refutation, or nothing.
  std::optional<Tree> bound_rule(const FastBox& box, const Analysis& an) {
    if (an.direct && an.direct->hi < 0) {
      ++counters_.passes;
      ++counters_.direct_passes;
      return ResultTree::pass(true);
    }
    if (an.ti && an.upper < 0) {
      ++counters_.passes;
      return ResultTree::pass(false);
    }
    std::optional<double> lower;
    if (an.direct) lower = an.direct->lo;
    if (an.ti) lower = lower ? std::max(*lower, an.lower) : an.lower;
    if (lower && *lower >= 0) {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!refuted_) witness_ = box;
        refuted_ = true;
      }
      return ResultTree::fail();
    }
    return std::nullopt;
  }

  std::optional<Tree> mono_rule(const FastBox& box, const Analysis& an, int depth) {
    const FastArith& a = ev_.arith;
    std::optional<std::vector<FastInterval>> grad;
    try {
      std::vector<FastInterval> iv(box.size());
      for (std::size_t i = 0; i < box.size(); ++i) iv[i] = {box.lo[i], box.hi[i]};
      grad = ev_.gradient(iv);
    } catch (const numeric::DomainError&) {
    }
    if (!grad && !an.ti) return std::nullopt;
    std::vector<MonoStatus> statuses;
    for (std::size_t j = 0; j < box.size(); ++j) {
      if (box.lo[j] == box.hi[j]) continue;
      FastInterval g{-HUGE_VAL, HUGE_VAL};
      if (grad) g = (*grad)[j];
      if (an.ti) {
        const FastInterval t = taylor::bound_gradient(*an.ti, static_cast<int>(j), a);
        g = {std::max(g.lo, t.lo), std::min(g.hi, t.hi)};
      }
      if (g.lo > g.hi) continue;
      if (g.lo >= 0) statuses.push_back({static_cast<int>(j), Direction::increasing});
      else if (g.hi < 0) statuses.push_back({static_cast<int>(j), Direction::decreasing});
    }
    if (statuses.empty()) return std::nullopt;
    FastBox face = box;
    for (const MonoStatus& s : statuses) {
      const auto j = static_cast<std::size_t>(s.coord);
      const double v = s.dir == Direction::increasing ? box.hi[j] : box.lo[j];
      if (params_.allow_pass_mono && root_.lo[j] < v && v < root_.hi[j]) {
        ++counters_.pass_monos;
        return ResultTree::pass_mono(s);
      }
      face.lo[j] = face.hi[j] = v;
    }
    ++counters_.monos;
    Tree child = node(face, depth);
    if (child->kind == NodeKind::fail) return child;
    return ResultTree::mono(std::move(statuses), std::move(child));
  }

  std::pair<Tree, Tree> children(const FastBox& left, const FastBox& right, int depth) {
    Tree l, r;
    if (parallel_ && depth < params_.task_depth) {
#pragma omp task shared(l) firstprivate(left, depth)
      l = node(left, depth + 1);
      r = node(right, depth + 1);
#pragma omp taskwait
    } else {
      l = node(left, depth + 1);
      if (l->kind == NodeKind::fail && refuted_) return {l, l};
      r = node(right, depth + 1);
    }
    return {l, r};
  }

  Tree glue(int j, bool convex, const FastBox& left, const FastBox& right, int depth) {
    auto [l, r] = children(left, right, depth);
    if (l->kind == NodeKind::fail) return l;
    if (r->kind == NodeKind::fail) return r;
    return ResultTree::glue(j, convex, std::move(l), std::move(r));
  }

  Tree node(const FastBox& box, int depth) {
    if (refuted_) return ResultTree::fail();
    ++counters_.nodes;
    for (int seen = counters_.max_depth; depth > seen && !counters_.max_depth.compare_exchange_weak(seen, depth);) {
    }
    const bool forced = depth < params_.min_split_depth;
    std::optional<Analysis> an;
    if (!forced) {
      an = analyse(box);
      if (params_.mono_first) {
        if (auto t = mono_rule(box, *an, depth)) return *t;
        if (auto t = bound_rule(box, *an)) return *t;
      } else {
        if (auto t = bound_rule(box, *an)) return *t;
        if (auto t = mono_rule(box, *an, depth)) return *t;
      }
      if (depth >= params_.max_depth) {
        record_witness(box);
        return ResultTree::fail();
      }
      if (params_.use_convexity && an->ti) {
        for (std::size_t j = 0; j < box.size(); ++j) {
          if (box.lo[j] == box.hi[j] || an->ti->second(static_cast<int>(j), static_cast<int>(j)).lo < 0) continue;
          ++counters_.convex;
          FastBox lo_face = box, hi_face = box;
          lo_face.hi[j] = box.lo[j];
          hi_face.lo[j] = box.hi[j];
          return glue(static_cast<int>(j), true, lo_face, hi_face, depth);
        }
      }
    }
    int j = -1;
    double widest = 0;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const double w = box.hi[i] - box.lo[i];
      if (w > widest) {
        widest = w;
        j = static_cast<int>(i);
      }
    }
    const auto k = static_cast<std::size_t>(j);
    const double mid = j < 0 ? 0 : ev_.arith.midpoint(box.lo[k], box.hi[k]);
    if (j < 0 || !(box.lo[k] < mid && mid < box.hi[k])) {
      record_witness(box);
      return ResultTree::fail();
    }
    ++counters_.splits;
    FastBox left = box, right = box;
    left.hi[k] = mid;
    right.lo[k] = mid;
    return glue(j, false, left, right, depth);
  }

  taylor::Evaluator<FastArith> ev_;
  SearchParams params_;
  FastBox root_;
  bool parallel_;
  Counters counters_;
  std::atomic<bool> refuted_{false};
  std::mutex mutex_;
  std::optional<FastBox> witness_;
};

}  // namespace

SearchOutcome certificate_search_serial(const taylor::CompiledProblem& problem, const Box& root,
                                        const SearchParams& params) {
  return Searcher(problem, root, params, false).run();
}

SearchOutcome certificate_search_parallel(const taylor::CompiledProblem& problem, const Box& root,
                                          const SearchParams& params) {
  return Searcher(problem, root, params, true).run();
}

SearchOutcome certificate_search(const taylor::CompiledProblem& problem, const Box& root, const SearchParams& params) {
  return params.workers <= 1 ? certificate_search_serial(problem, root, params)
                             : certificate_search_parallel(problem, root, params);
}

}  // namespace nlv::search
