#pragma once

// OpenQASM 2.0 emission using qelib1.inc gate names. Dyadic rotations map to
// u1 with exact pi-fraction angle text (RZk(1) -> "u1(pi)"), controlled
// rotations to cu1, and doubly-controlled rotations to emitted gate
// definitions built from cu1 and cx. Output is deterministic.

#include <string>

#include "oq/circuit.hpp"

namespace oq {

std::string emit_qasm(const Circuit& c);

}  // namespace oq
