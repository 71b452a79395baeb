#pragma once

#include <stdexcept>

#include "nlv/search/box.hpp"
#include "nlv/search/certificate.hpp"

namespace nlv::search {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Turns a search tree into a reference-linked list without PassMono nodes.
/// Repeatedly moves maximal PassMono-free subtrees into the list (replacing
/// them by Ref nodes), then resolves each PassMono whose face lies in a listed
/// box into its own Mono-over-Ref entry. The residual tree is appended last
/// with the empty path. Throws TransformError when the tree contains a fail
/// node or a PassMono face is never covered.
CertificateList transform_certificate(const Tree& tree, const Box& root);

}  // namespace nlv::search
