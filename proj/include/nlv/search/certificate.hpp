#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace nlv::search {

enum class Direction : unsigned char { increasing, decreasing };

/// Sign of one partial derivative over a box. `decreasing` always means the
/// strict bound f_j < 0.
struct MonoStatus {
  int coord = 0;  // zero-based
  Direction dir = Direction::increasing;

  friend bool operator==(const MonoStatus&, const MonoStatus&) = default;
};

enum class NodeKind : unsigned char { fail, pass, mono, glue, pass_mono, ref };

struct ResultTree;
using Tree = std::shared_ptr<const ResultTree>;

/// One node of a solution certificate. Nodes are immutable and shared.
struct ResultTree {
  NodeKind kind = NodeKind::fail;
  bool direct = false;              // pass: direct interval evaluation suffices
  std::vector<MonoStatus> statuses; // mono: ascending coordinates; pass_mono: exactly one
  int coord = -1;                   // glue
  bool convex = false;              // glue
  std::size_t ref = 0;              // ref: index of an earlier list entry
  std::vector<Tree> children;       // mono: one; glue: two
  int precision = 0;                // digits to replay at; 0 = the run default

  static Tree fail();
  static Tree pass(bool direct = false, int precision = 0);
  static Tree mono(std::vector<MonoStatus> statuses, Tree child, int precision = 0);
  static Tree glue(int coord, bool convex, Tree left, Tree right, int precision = 0);
  static Tree pass_mono(MonoStatus status);
  static Tree reference(std::size_t index);
};

bool contains_kind(const Tree& t, NodeKind kind);
std::size_t count_nodes(const Tree& t);
bool structurally_equal(const Tree& a, const Tree& b, bool compare_precision = true);

/// How a sub-box is reached from its parent.
enum class Side : unsigned char {
  left,     // lower half of a split
  right,    // upper half of a split
  lo_face,  // coordinate collapsed to its lower end
  hi_face,  // coordinate collapsed to its upper end
};

struct PathStep {
  Side side = Side::left;
  int coord = 0;  // zero-based

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

using Path = std::vector<PathStep>;

/// The face a monotone direction restricts to: the maximum of f lies on the
/// hi face when f_j >= 0 and on the lo face when f_j < 0.
inline Side face_of(Direction d) { return d == Direction::increasing ? Side::hi_face : Side::lo_face; }

struct CertificateEntry {
  Path path;
  Tree tree;

  friend bool operator==(const CertificateEntry& a, const CertificateEntry& b) {
    return a.path == b.path && structurally_equal(a.tree, b.tree);
  }
};

/// Entries are replayed in order; Ref(k) in entry i requires k < i. The last
/// entry has the empty path and proves the claim on the root box.
using CertificateList = std::vector<CertificateEntry>;

/// Structural well-formedness: nonempty, last path empty, no fail or
/// pass_mono node, refs backward, child counts match kinds. Returns an empty
/// string when well-formed, otherwise a description of the first problem.
std::string validate_structure(const CertificateList& list, int dimension);

}  // namespace nlv::search
