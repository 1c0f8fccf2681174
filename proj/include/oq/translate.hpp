#pragma once

// Translation from the assembly language to gate circuits. Position
// permutations (Lshift/Rshift/Rev) never emit data gates: they update the
// register-to-wire map and emit a single ID marker, so shifts are free in the
// gate counts.

#include "oq/ast.hpp"
#include "oq/circuit.hpp"

namespace oq {

// Register -> offset -> physical wire. Kept total and injective.
struct QubitMap {
    std::vector<std::vector<uint32_t>> wire;

    uint32_t at(const Position& p) const { return wire[p.var][p.offset]; }
    bool operator==(const QubitMap& o) const { return wire == o.wire; }
};

// Declaration-order layout: register v occupies consecutive wires.
QubitMap identity_map(const Registers& regs);

struct TranslateResult {
    QubitMap map;  // final map after all virtual shifts
    Circuit circ;
};

TranslateResult translate(const Registers& regs, const QubitMap& initial,
                          const InstrPtr& prog);

// Convenience overload starting from the declaration-order layout.
TranslateResult translate(const Registers& regs, const InstrPtr& prog);

}  // namespace oq
