#pragma once

// The shared classical-control execution core. The walker runs the
// elaborated program's classical part exactly once and identically for
// every client: it owns the constant store (all C-mode evaluation), scope
// and loop unrolling, C-guard branch selection, call inlining, and the
// per-lvalue history bookkeeping with its validity rules. Clients receive
// the residual Q-mode effects as a stream of events whose operands are
// already resolved to value slots or constants.
//
// A Slot names one pushed Q value — one register's worth of state. Fresh
// assignments and declarations mint slots; op-assignments rewrite the top
// slot in place; inv pops the youngest history entry. Because all three
// consumers (inv checker, reference interpreter, circuit compiler) ride the
// same walk, the interpreter and the compiled circuit agree bit for bit.
//
// History validity, enforced here for every inv along the walked path:
//   - the popped entry must exist and must have been pushed under the same
//     Q-guard occurrence ("inv_no_predecessor");
//   - no operand slot of the entry may have been rewritten in place, or
//     popped, since the entry was pushed ("inv_operand_written") — plain
//     re-assignment of an operand variable is harmless because it mints a
//     fresh slot and the old one stays intact;
//   - pops must not outnumber pushes ("inv_count").
//
// Q-guarded ifs walk both branches; the guard slot's value is frozen at
// entry, so writes to the guard variable inside its own branches do not
// re-steer them. Function calls with a Q result walk the callee body,
// deliver the return copy, then unwind every history effect made since the
// call began (on_call_end); the compiler realizes the unwind by appending
// the inverse of the recorded body, the interpreter by restoring values.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oq/qimp_check.hpp"
#include "oq/qimp_val.hpp"

namespace oq::qimp {

using Slot = uint32_t;

struct QAtom {
    bool is_const = true;
    uval value = 0;  // constant operand (a C subexpression's value)
    Slot slot = 0;   // live Q operand otherwise
    Base base = Base::Nat;
};

// Widths are sz for nat/fixedp and 1 for bool. `entry` numbers history
// entries globally; on_inv replays the entry id so a client can key
// recorded state by it.
struct Sink {
    virtual ~Sink() = default;
    // Uninitialized Q global: a runtime input register.
    virtual void on_input(Slot, const std::string& /*name*/, uint32_t /*elem*/,
                          Base, uint32_t /*width*/) {}
    // Uninitialized Q local: a zeroed register (not an input, not undoable).
    virtual void on_zero(Slot, Base, uint32_t /*width*/) {}
    // dst := src (fresh slot)
    virtual void on_load(uint64_t /*entry*/, Slot /*dst*/, Base,
                         uint32_t /*width*/, const QAtom& /*src*/) {}
    // dst := a op b (fresh slot)
    virtual void on_bin(uint64_t, Slot, Base, uint32_t, Bop, const QAtom& /*a*/,
                        const QAtom& /*b*/) {}
    // dst op= v, in place on the top slot (op in Add/Sub/Xor/RotL/RotR;
    // rotation amounts arrive as constants)
    virtual void on_op_assign(uint64_t, Slot, Base, uint32_t, Bop,
                              const QAtom&) {}
    // Undo history entry `entry`. in_place: apply the inverse update to the
    // slot; otherwise the slot's value is uncomputed and the slot dies.
    virtual void on_inv(uint64_t, Slot, bool /*in_place*/) {}
    // Q-guarded branching. Events between begin and else (or end) belong to
    // the then-branch; between else and end to the else-branch. on_if_else
    // is omitted when the else-branch is empty.
    virtual void on_if_begin(Slot /*guard*/) {}
    virtual void on_if_else() {}
    virtual void on_if_end() {}
    // Call with a Q return value. Body events arrive between begin and end.
    // on_call_end delivers the return copy (dst := ret, a fresh slot) and
    // requires undoing every body effect: slots minted since on_call_begin
    // are dead afterwards, in-place writes are reverted.
    virtual void on_call_begin() {}
    virtual void on_call_end(uint64_t /*entry*/, Slot /*dst*/, Base,
                             uint32_t /*width*/, const QAtom& /*ret*/) {}
};

struct WalkResult {
    // Classical Error result (division by zero, out-of-bounds index, frac
    // domain, unmet loop budget). The walk stops where it occurred.
    std::optional<std::string> error;
    std::map<std::string, std::vector<Slot>> q_final;  // global -> top slots
    std::map<std::string, std::vector<uval>> c_final;  // global -> values
};

// Throws qimp_error (rules inv_no_predecessor / inv_operand_written /
// inv_count) on a history violation; also for unknown or ill-typed names in
// c_overrides (rule "override"). Aliasing of a destination with one of its
// own array-element operands surfaces as rule "binop_q".
WalkResult walk_program(const CheckedProgram& p, uint32_t sz,
                        const std::map<std::string, uval>& c_overrides,
                        Sink& sink);

}  // namespace oq::qimp
