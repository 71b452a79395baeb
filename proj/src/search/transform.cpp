#include "nlv/search/transform.hpp"

#include <optional>
#include <unordered_map>

namespace nlv::search {

namespace {

// Double enclosure of a box's endpoints, used to reject most subset tests
// without exact comparisons.
struct Envelope {
  std::vector<double> lo_down, lo_up, hi_down, hi_up;

  explicit Envelope(const Box& b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      lo_down.push_back(b.lo[i].to_double(numeric::Rounding::down));
      lo_up.push_back(b.lo[i].to_double(numeric::Rounding::up));
      hi_down.push_back(b.hi[i].to_double(numeric::Rounding::down));
      hi_up.push_back(b.hi[i].to_double(numeric::Rounding::up));
    }
  }

  // False only when inner is certainly not inside outer.
  static bool may_contain(const Envelope& outer, const Envelope& inner) {
    for (std::size_t i = 0; i < outer.lo_down.size(); ++i)
      if (inner.lo_up[i] < outer.lo_down[i] || inner.hi_down[i] > outer.hi_up[i]) return false;
    return true;
  }
};

class Transformer {
 public:
  explicit Transformer(const Box& root) : root_(root) {}

  CertificateList run(Tree tree) {
    if (contains_kind(tree, NodeKind::fail)) throw TransformError("search tree contains a fail node");
    for (;;) {
      deferred_.clear();
      if (!mark(tree)) {
        list_.push_back({{}, tree});
        return std::move(list_);
      }
      Path path;
      tree = extract(tree, path);
      deferred_.clear();
      mark(tree);
      bool progress = false;
      tree = resolve(tree, path, root_, progress);
      if (!progress) throw TransformError("a monotone face is not covered by any listed box");
    }
  }

 private:
  // Records which nodes contain a PassMono; returns whether t does.
  bool mark(const Tree& t) {
    bool has = t->kind == NodeKind::pass_mono;
    for (const Tree& c : t->children) has = mark(c) || has;
    deferred_[t.get()] = has;
    return has;
  }

  bool deferred(const Tree& t) const { return deferred_.at(t.get()); }

  void append(Path path, Tree tree, Box box) {
    list_.push_back({std::move(path), std::move(tree)});
    envelopes_.emplace_back(box);
    boxes_.push_back(std::move(box));
  }

  // Moves maximal PassMono-free subtrees into the list.
  Tree extract(const Tree& t, Path& path) {
    if (!deferred(t)) {
      if (t->kind == NodeKind::ref) return t;
      append(path, t, apply_path(root_, path));
      return ResultTree::reference(list_.size() - 1);
    }
    return rebuild(t, path, [&](const Tree& c, Path& p, const Box*) { return extract(c, p); }, nullptr);
  }

  Tree resolve(const Tree& t, Path& path, const Box& box, bool& progress) {
    if (!deferred(t)) return t;
    if (t->kind == NodeKind::pass_mono) {
      const MonoStatus s = t->statuses.front();
      const Box face = restrict_box(box, s.coord, face_of(s.dir));
      const Envelope env(face);
      // Boxes already scanned for this node cannot cover it on a later pass.
      std::size_t& scanned = scanned_[t.get()];
      for (std::size_t k = scanned; k < boxes_.size(); ++k) {
        if (!Envelope::may_contain(envelopes_[k], env) || !subset(face, boxes_[k])) continue;
        append(path, ResultTree::mono({s}, ResultTree::reference(k)), box);
        progress = true;
        return ResultTree::reference(list_.size() - 1);
      }
      scanned = boxes_.size();
      return t;
    }
    return rebuild(
        t, path, [&](const Tree& c, Path& p, const Box* b) { return resolve(c, p, *b, progress); }, &box);
  }

  // Applies `f` to each child with its path (and box, when `box` is given).
  template <class F>
  Tree rebuild(const Tree& t, Path& path, F&& f, const Box* box) {
    switch (t->kind) {
      case NodeKind::mono: {
        std::optional<Box> inner;
        const std::size_t depth = path.size();
        for (const MonoStatus& s : t->statuses) path.push_back({face_of(s.dir), s.coord});
        if (box) {
          inner = *box;
          for (const MonoStatus& s : t->statuses) inner = restrict_box(*inner, s.coord, face_of(s.dir));
        }
        Tree child = f(t->children[0], path, inner ? &*inner : nullptr);
        path.resize(depth);
        return ResultTree::mono(t->statuses, std::move(child), t->precision);
      }
      case NodeKind::glue: {
        const Side ls = t->convex ? Side::lo_face : Side::left;
        const Side rs = t->convex ? Side::hi_face : Side::right;
        std::optional<Box> lb, rb;
        if (box) {
          lb = step_box(*box, {ls, t->coord});
          rb = step_box(*box, {rs, t->coord});
        }
        path.push_back({ls, t->coord});
        Tree l = f(t->children[0], path, lb ? &*lb : nullptr);
        path.back() = {rs, t->coord};
        Tree r = f(t->children[1], path, rb ? &*rb : nullptr);
        path.pop_back();
        return ResultTree::glue(t->coord, t->convex, std::move(l), std::move(r), t->precision);
      }
      default: return t;
    }
  }

  Box root_;
  CertificateList list_;
  std::vector<Box> boxes_;
  std::vector<Envelope> envelopes_;
  std::unordered_map<const ResultTree*, bool> deferred_;
  std::unordered_map<const ResultTree*, std::size_t> scanned_;
};

}  // namespace

CertificateList transform_certificate(const Tree& tree, const Box& root) { return Transformer(root).run(tree); }

}  // namespace nlv::search
