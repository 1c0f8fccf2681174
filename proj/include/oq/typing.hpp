#pragma once

// Basis-tracking type system. Each register is either in the computational
// basis (Nor) or in the n-bit Fourier basis (Phi n). The typechecker threads a
// register->basis environment through the program and reports the first
// violation as a value (not an exception) so tooling can surface it.

#include <string>
#include <variant>
#include <vector>

#include "oq/ast.hpp"

namespace oq {

enum class BasisKind : uint8_t { Nor, Phi };

struct Basis {
    BasisKind kind = BasisKind::Nor;
    uint32_t precision = 0;  // meaningful for Phi only

    static Basis nor() { return {BasisKind::Nor, 0}; }
    static Basis phi(uint32_t n) { return {BasisKind::Phi, n}; }

    bool operator==(const Basis& o) const {
        if (kind != o.kind) return false;
        return kind == BasisKind::Nor || precision == o.precision;
    }
    bool operator!=(const Basis& o) const { return !(*this == o); }

    std::string str() const;
};

// Register index -> basis, dense over the register table.
using TypeEnv = std::vector<Basis>;

TypeEnv all_nor(const Registers& regs);

struct TypeError {
    std::string rule;      // name of the violated side condition
    std::string message;   // human-readable description with expected/actual
    uint64_t instr_index;  // leaf index (execution order) of the offender
};

using TypecheckResult = std::variant<TypeEnv, TypeError>;

inline bool typecheck_ok(const TypecheckResult& r) {
    return std::holds_alternative<TypeEnv>(r);
}

// Typecheck `prog` under register sizes `regs` starting from `env`.
// On success returns the final environment; on failure the first error in
// execution order.
TypecheckResult typecheck(const Registers& regs, const TypeEnv& env, const InstrPtr& prog);

// True when instruction `body` never touches position `p` (so a control on
// `p` commutes with the body). Whole-register operations touch every offset
// of their register.
bool fresh(const Position& p, const InstrPtr& body);

// True when the net offset permutation applied by `body` is the identity on
// every register. Position permutations (Lshift/Rshift/Rev) compose as
// elements i -> sign*i + shift (mod size) of the dihedral group, so the net
// effect is tracked exactly. Control bodies must themselves be neutral.
bool neutral(const Registers& regs, const InstrPtr& body);

}  // namespace oq
