#include "nlv/search/certificate.hpp"


namespace nlv::search {

Tree ResultTree::fail() {
  static const Tree node = std::make_shared<const ResultTree>();
  return node;
}

Tree ResultTree::pass(bool direct, int precision) {
  ResultTree n;
  n.kind = NodeKind::pass;
  n.direct = direct;
  n.precision = precision;
  return std::make_shared<const ResultTree>(std::move(n));
}

Tree ResultTree::mono(std::vector<MonoStatus> statuses, Tree child, int precision) {
  ResultTree n;
  n.kind = NodeKind::mono;
  n.statuses = std::move(statuses);
  n.children = {std::move(child)};
  n.precision = precision;
  return std::make_shared<const ResultTree>(std::move(n));
}

Tree ResultTree::glue(int coord, bool convex, Tree left, Tree right, int precision) {
  ResultTree n;
  n.kind = NodeKind::glue;
  n.coord = coord;
  n.convex = convex;
  n.children = {std::move(left), std::move(right)};
  n.precision = precision;
  return std::make_shared<const ResultTree>(std::move(n));
}

Tree ResultTree::pass_mono(MonoStatus status) {
  ResultTree n;
  n.kind = NodeKind::pass_mono;
  n.statuses = {status};
  return std::make_shared<const ResultTree>(std::move(n));
}

Tree ResultTree::reference(std::size_t index) {
  ResultTree n;
  n.kind = NodeKind::ref;
  n.ref = index;
  return std::make_shared<const ResultTree>(std::move(n));
}

bool contains_kind(const Tree& t, NodeKind kind) {
  if (t->kind == kind) return true;
  for (const Tree& c : t->children)
    if (contains_kind(c, kind)) return true;
  return false;
}

std::size_t count_nodes(const Tree& t) {
  std::size_t n = 1;
  for (const Tree& c : t->children) n += count_nodes(c);
  return n;
}

bool structurally_equal(const Tree& a, const Tree& b, bool compare_precision) {
  if (a == b) return true;
  if (a->kind != b->kind || a->direct != b->direct || a->statuses != b->statuses || a->coord != b->coord ||
      a->convex != b->convex || a->ref != b->ref || a->children.size() != b->children.size())
    return false;
  if (compare_precision && a->precision != b->precision) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!structurally_equal(a->children[i], b->children[i], compare_precision)) return false;
  return true;
}

namespace {

std::string validate_node(const Tree& t, std::size_t entry, int dimension) {
  auto coord_ok = [&](int j) { return j >= 0 && j < dimension; };
  switch (t->kind) {
    case NodeKind::fail: return "FALSE node";
    case NodeKind::pass_mono: return "unresolved PASSMONO node";
    case NodeKind::pass:
      if (!t->children.empty()) return "PASS with children";
      return {};
    case NodeKind::ref:
      if (t->ref >= entry) return "REF(" + std::to_string(t->ref) + ") is not an earlier entry";
      return {};
    case NodeKind::mono:
      if (t->children.size() != 1) return "MONO needs one child";
      for (std::size_t i = 0; i < t->statuses.size(); ++i) {
        if (!coord_ok(t->statuses[i].coord)) return "MONO coordinate out of range";
        if (i > 0 && t->statuses[i - 1].coord >= t->statuses[i].coord) return "MONO coordinates not ascending";
      }
      return validate_node(t->children[0], entry, dimension);
    case NodeKind::glue:
      if (t->children.size() != 2) return "GLUE needs two children";
      if (!coord_ok(t->coord)) return "GLUE coordinate out of range";
      if (auto e = validate_node(t->children[0], entry, dimension); !e.empty()) return e;
      return validate_node(t->children[1], entry, dimension);
  }
  return "unknown node";
}

}  // namespace

std::string validate_structure(const CertificateList& list, int dimension) {
  if (list.empty()) return "empty certificate list";
  if (!list.back().path.empty()) return "last entry must have the empty path";
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (const PathStep& s : list[i].path)
      if (s.coord < 0 || s.coord >= dimension) return "entry " + std::to_string(i) + ": path coordinate out of range";
    if (!list[i].tree) return "entry " + std::to_string(i) + ": missing tree";
    if (auto e = validate_node(list[i].tree, i, dimension); !e.empty()) return "entry " + std::to_string(i) + ": " + e;
  }
  return {};
}

}  // namespace nlv::search
