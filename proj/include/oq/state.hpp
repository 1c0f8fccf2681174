#pragma once

// Simulator state: one (phase, payload) record per qubit plus a fixed dyadic
// precision G shared by the whole state. All phases and rotations are exact
// dyadic fractions stored as numerators modulo 2^G; no floating point is
// involved in simulation.

#include <map>
#include <string>
#include <vector>

#include "oq/ast.hpp"
#include "oq/common.hpp"
#include "oq/typing.hpp"

namespace oq {

// A single qubit: a local phase factor exp(2*pi*i * phase_num / 2^G) times
// either a computational-basis bit (Nor) or a Fourier-basis rotation
// (Phi, value (|0> + exp(2*pi*i * rot_num / 2^G)|1>)/sqrt(2)).
struct QubitValue {
    uval phase_num = 0;
    BasisKind basis = BasisKind::Nor;
    uval bit = 0;   // Nor payload: 0 or 1
    uval rot = 0;   // Phi payload: rotation numerator mod 2^G

    bool operator==(const QubitValue& o) const {
        if (phase_num != o.phase_num || basis != o.basis) return false;
        return basis == BasisKind::Nor ? bit == o.bit : rot == o.rot;
    }
    bool operator!=(const QubitValue& o) const { return !(*this == o); }
};

struct OqasmState {
    uint32_t precision = 1;        // G: phases are numerators mod 2^G
    std::vector<uint32_t> start;   // register -> first qubit index
    std::vector<QubitValue> qubits;

    uval modulus() const { return pow2(precision); }
    uval mask() const { return mask_bits(precision); }

    bool operator==(const OqasmState& o) const {
        return precision == o.precision && start == o.start && qubits == o.qubits;
    }
};

// Fault raised by the simulator on ill-formed input (basis mismatch,
// inconsistent Fourier payload, out-of-range position).
struct sim_fault : std::runtime_error {
    explicit sim_fault(const std::string& msg) : std::runtime_error(msg) {}
};

// Chooses the state precision for a register table: the largest register size
// (at least 1), so every rotation 1/2^k used by any transform is exact.
uint32_t natural_precision(const Registers& regs);

// Builds the all-Nor state with the given register values, little-endian:
// bit k of the value sits at offset k. Missing registers default to 0.
OqasmState encode_inputs(const Registers& regs, const std::map<Var, uval>& values);

// Reads a register in the computational basis, little-endian. Faults if any
// qubit of the register is in the Fourier basis.
uval decode_nor(const Registers& regs, const OqasmState& st, Var v);

// Checks a state against a basis environment: every qubit of a Nor register
// holds a bit; a Phi-n register stores a consistent n-bit Fourier value
// (offset k holds rotation frac(y / 2^(n-k)) for the value y recovered from
// offset 0, and offsets past the precision hold rotation 0 or 1/2).
bool well_formed_state(const Registers& regs, const TypeEnv& env, const OqasmState& st);

}  // namespace oq
