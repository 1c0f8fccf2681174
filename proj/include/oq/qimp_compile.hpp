#pragma once

// Circuit generation for the imperative frontend. The generator rides the
// same classical-control walker as the reference interpreter, so the two
// agree on every branch taken, every loop trip, every constant folded, and
// every classical Error raised. Each walker event is realized as a gate
// fragment on a register table built on the fly:
//
//   * every value slot owns one register for its lifetime; registers of
//     dead slots (undone assignments, unwound callee state) are uncomputed
//     to zero and recycled;
//   * scratch used inside a single fragment (carry wires, loaded constants,
//     product and quotient registers) comes from a separate helper pool that
//     is always zero between fragments, so recorded fragments can be
//     replayed in reverse by `inv` and by call unwinding;
//   * under quantum guards a one-bit conjunction register is maintained;
//     in-place updates thread it through their gates (promoted controls),
//     while multiply/divide/compare fragments compute unguarded into
//     scratch and guard only the final copy into the destination.
//
// Flag picks the arithmetic style for +, -, *, / and comparisons:
// QFT uses Fourier-basis rotation cascades, Classical uses Toffoli-level
// ripple-carry networks. XOR, rotations, and copies are basis-free.

#include "oq/ast.hpp"
#include "oq/qimp_walk.hpp"

namespace oq::qimp {

enum class Flag { Classical, QFT };

const char* flag_name(Flag f);

struct CompileResult {
    // Classical Error raised while resolving the program (division by zero,
    // index out of range, builtin domain, loop budget). Exactly the
    // programs the interpreter rejects are rejected here, with the same
    // message; no circuit is produced.
    std::optional<std::string> error;

    uint32_t sz = 0;
    Flag flag = Flag::QFT;
    Registers regs;
    InstrPtr prog;  // null when error is set

    // Per-element registers of quantum globals: `outputs` holds each
    // variable's final value; `inputs` lists the registers the circuit
    // reads as runtime inputs (uninitialized quantum globals).
    std::map<std::string, std::vector<Var>> outputs;
    std::map<std::string, std::vector<Var>> inputs;

    std::map<std::string, std::vector<uval>> c_env;  // final classical values
    std::vector<std::string> ops;  // dispatch tags in emission order

    uint32_t total_qubits = 0;
    uint32_t io_qubits = 0;  // qubits covered by inputs/outputs registers

    // Pool registers that end the program uncomputed to zero.
    std::vector<Var> free_scratch;

    // JSON layout description: bit width, flavor, qubit totals, the
    // variable-to-register map, classical environment, and dispatch tags.
    std::string manifest() const;
};

CompileResult compile(const CheckedProgram& p, uint32_t sz, Flag flag,
                      const std::map<std::string, uval>& c_overrides = {});

}  // namespace oq::qimp
