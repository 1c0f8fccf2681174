#pragma once

// Low-level circuit emission helpers shared by the oracle constructors and
// the imperative-language compiler: Fourier-basis rotation cascades and
// ripple-carry networks that operate on caller-supplied registers.

#include <optional>
#include <vector>

#include "oq/ast.hpp"
#include "oq/common.hpp"

namespace oq::emit {

using V = std::vector<InstrPtr>;

inline Position at(Var v, uint32_t k) { return Position{v, k}; }

inline InstrPtr cx(Position c, Position t) { return make_cu(c, make_x(t)); }

inline InstrPtr ccx(Position c0, Position c1, Position t) {
    return make_cu(c0, make_cu(c1, make_x(t)));
}

// value += val on a width-bit Fourier-basis register (big-endian wire
// order): bit j of val has weight 2^j and maps to rotation index width-1-j.
// Emits a placeholder skip when no bit of val is set.
InstrPtr phi_add_const(Var b, uint32_t width, uval val, bool subtract = false);
InstrPtr phi_sub_const(Var b, uint32_t width, uval val);

// value_b += y for a little-endian operand register y of ny bits; one
// controlled rotation cascade per operand bit.
void phi_add_reg(V& out, Var y, uint32_t ny, Var b, uint32_t width, bool subtract);

// X-loads the set bits of val into h; calling twice unloads.
void load_const(V& out, Var h, uint32_t width, uval val);

struct CuccaroOpts {
    std::optional<Position> ctrl;  // promotes sum-writing gates to CCX
    bool carry_out = false;        // XOR the final carry into b[base+len]
};

// Ripple-carry addition b[base..base+len) += a[0..len) modulo 2^len, or the
// exact (len+1)-bit sum into the window extended by b[base+len] when
// carry_out is set. The carry position supplies carry-in 0 and is restored;
// a is restored.
void cuccaro_add(V& out, Var a, Var b, uint32_t base, uint32_t len,
                 Position carry, const CuccaroOpts& opts = {});
void cuccaro_sub(V& out, Var a, Var b, uint32_t base, uint32_t len,
                 Position carry, const CuccaroOpts& opts = {});

// Carry chain only: after these gates the carry of a + b_window + carry_in
// sits in wire a[len-1]. Append the exact inverse to undo.
V maj_chain(Var a, Var b, uint32_t base, uint32_t len, Position carry);

}  // namespace oq::emit
