#pragma once

// Structural program inversion: invert(p) undoes p exactly, so p followed by
// invert(p) is the identity on every well-formed state.

#include "oq/ast.hpp"

namespace oq {

InstrPtr invert(const InstrPtr& prog);

}  // namespace oq
