#pragma once

#include "nlv/cli/run.hpp"

namespace nlv::cli {

/// Fast-tier search followed by the transform. If the transform cannot
/// resolve a deferred face, the search is rerun with every face searched
/// directly.
SearchBackend search_backend();

}  // namespace nlv::cli
