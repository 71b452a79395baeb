#include <omp.h>

#include "nlv/checker/checker.hpp"

namespace nlv::checker {

using search::NodeKind;
using search::ResultTree;
using search::Side;

namespace {

class Annotator {
 public:
  Annotator(const Checker& c, int max_digits) : c_(c), max_(max_digits) {}

  Tree node(const Tree& t, const Box& box) const {
    switch (t->kind) {
      case NodeKind::pass: {
        for (int p = 1; p <= max_; ++p)
          if (c_.pass_holds(box, true, p)) return ResultTree::pass(true, p);
        for (int p = 1; p <= max_; ++p)
          if (c_.pass_holds(box, false, p)) return ResultTree::pass(false, p);
        return ResultTree::pass(t->direct, max_);
      }
      case NodeKind::mono: {
        int digits = max_;
        for (int p = 1; p < max_; ++p)
          if (c_.mono_holds(box, t->statuses, p)) {
            digits = p;
            break;
          }
        Box face = box;
        for (const auto& s : t->statuses) face = search::restrict_box(face, s.coord, search::face_of(s.dir));
        return ResultTree::mono(t->statuses, node(t->children.at(0), face), digits);
      }
      case NodeKind::glue: {
        Box lb, rb;
        int digits = 1;
        if (t->convex) {
          digits = max_;
          for (int p = 1; p < max_; ++p)
            if (c_.convex_holds(box, t->coord, p)) {
              digits = p;
              break;
            }
          lb = search::restrict_box(box, t->coord, Side::lo_face);
          rb = search::restrict_box(box, t->coord, Side::hi_face);
        } else {
          std::tie(lb, rb) = search::split_box(box, t->coord);
        }
        return ResultTree::glue(t->coord, t->convex, node(t->children.at(0), lb), node(t->children.at(1), rb),
                                digits);
      }
      default: return t;
    }
  }

 private:
  const Checker& c_;
  int max_;
};

}  // namespace

CertificateList annotate_adaptive(const Checker& checker, const CertificateList& list, int max_digits) {
  const Annotator a(checker, max_digits);
  CertificateList out(list.size());
  const auto n = static_cast<long>(list.size());
  const int threads = std::max(1, checker.options().workers);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    const auto& e = list[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)].path = e.path;
    try {
      out[static_cast<std::size_t>(i)].tree = a.node(e.tree, search::apply_path(checker.root(), e.path));
    } catch (const search::GeometryError&) {
      out[static_cast<std::size_t>(i)].tree = e.tree;
    }
  }
  return out;
}

}  // namespace nlv::checker
