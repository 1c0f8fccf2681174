#pragma once

// Exact interpreter. Cost is linear in program length times register width:
// every instruction acts on single-qubit records, never on amplitude vectors.

#include "oq/ast.hpp"
#include "oq/state.hpp"

namespace oq {

// Runs `prog` on `st` and returns the final state. Faults (sim_fault) on
// basis mismatches or inconsistent Fourier payloads; programs accepted by the
// typechecker never fault on well-formed states.
OqasmState interpret(const Registers& regs, const InstrPtr& prog, OqasmState st);

}  // namespace oq
