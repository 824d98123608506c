#pragma once

#include <string>
#include <vector>

#include "modalnet/mdn.hpp"

namespace mnet::dsl {

// Graphviz text for the diagram of `f` at one source mode. Inner boxes are
// clusters named by `labels` (one per source factor, defaulting to X0, X1,
// ...), the outer box is split into an input and an output node, and every
// feed is one edge. Node and port ids depend only on factor positions and
// port names, so emissions at different modes diff cleanly.
// Errors: UnknownMode.
std::string emit_dot(const MdnMorphism& f, const Mode& mode, const std::vector<std::string>& labels = {},
                     const std::string& name = "G");

}  // namespace mnet::dsl
