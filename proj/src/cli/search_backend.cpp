#include "nlv/cli/search_backend.hpp"

#include "nlv/search/search.hpp"
#include "nlv/search/transform.hpp"

namespace nlv::cli {

namespace {

search::Box to_box(const search::FastBox& f, int base) {
  search::Box b;
  const numeric::Precision exact{base, 64};
  for (std::size_t i = 0; i < f.size(); ++i) {
    b.lo.push_back(numeric::round_rational(mpq_class(f.lo[i]), exact, numeric::Rounding::down));
    b.hi.push_back(numeric::round_rational(mpq_class(f.hi[i]), exact, numeric::Rounding::up));
  }
  return b;
}

SearchResult search_and_transform(const taylor::CompiledProblem& cp, const search::Box& root,
                                  const SearchRequest& req) {
  search::SearchParams params;
  params.max_depth = req.max_depth;
  params.min_split_depth = req.min_split_depth;
  params.mono_first = req.mono_first;
  params.workers = req.workers;
  SearchResult r;
  const int base = root.size() > 0 ? root.lo.front().base() : 10;
  for (bool deferred : {true, false}) {
    params.allow_pass_mono = deferred;
    const search::SearchOutcome o = search::certificate_search(cp, root, params);
    r.nodes += o.stats.nodes;
    r.depth = std::max(r.depth, o.stats.max_depth_reached);
    if (o.status != search::SearchStatus::verified) {
      r.status = o.status == search::SearchStatus::refuted ? SearchResult::Status::refuted
                                                           : SearchResult::Status::inconclusive;
      r.witness = to_box(o.witness, base > 1 ? base : 10);
      return r;
    }
    try {
      r.certificate = search::transform_certificate(o.tree, root);
      r.status = SearchResult::Status::verified;
      r.fallback = !deferred;
      return r;
    } catch (const search::TransformError&) {
    }
  }
  return r;
}

}  // namespace

SearchBackend search_backend() { return search_and_transform; }

}  // namespace nlv::cli
