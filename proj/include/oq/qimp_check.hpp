#pragma once

// Type and mode checking plus elaboration for the imperative front end.
//
// typecheck_program validates the surface AST and rewrites it into a
// three-address core form that the interpreter and the circuit compiler
// both consume, so the two stay in bit-exact agreement by construction:
//
//   - Compound Q-mode expressions are flattened through fresh temporaries
//     named __tK; each temporary is uncomputed (inv) right after the
//     statement that consumes it.
//   - The fixed-point pattern (e1 * e2) / M with a compile-time nat divisor
//     M is rewritten to divide first and multiply second, preferring a
//     compile-time operand for the division slot, so a constant operand
//     turns the division into pure compile-time arithmetic and the multiply
//     into a constant multiplier.
//   - Purely compile-time (C-mode) subexpressions are left as trees; they
//     are evaluated against the constant store during the shared walk and
//     never consume qubits.
//
// Mode discipline (checked here, named rules in qimp_error::rule):
//   - "binop_q": a Q-mode binary assignment may not name its destination as
//     an operand (scalar aliasing; array element aliasing is caught during
//     the classical walk when indices are known).
//   - "binop_c": C-mode state may not change under a Q-mode guard — no
//     C assignments, C declarations, or for loops inside a Q if.
//   - "if": a Q guard forces both branches to be checked in Q context.
//   - "for": loop counter, bound, and step are C-mode nat.
//   - "call": arguments are C-mode, arity must match, callees must be
//     declared earlier (no recursion), and only value-returning functions
//     may be called. A function whose return value is C-mode must have a
//     body free of Q-mode statements (it is evaluated entirely at compile
//     time); a Q-mode return value may only be assigned to a Q lvalue.
//   - "div": / and % require a compile-time (C-mode) divisor.
//   - "mode": a Q value where a C value is required (indices, bounds, C
//     assignments); C values are accepted wherever Q is expected.

#include <map>
#include <optional>
#include <vector>

#include "oq/qimp_ast.hpp"

namespace oq::qimp {

struct FunInfo {
    std::vector<Type> param_types;
    std::optional<Type> ret_type;  // nullopt: no return statement
    bool pure_c = false;           // body free of Q-mode statements
};

struct CheckedProgram {
    Program prog;  // elaborated three-address form
    std::map<std::string, Type> global_types;
    // Q globals in declaration order; those without initializers are the
    // runtime inputs of the compiled circuit.
    std::vector<std::string> q_globals;
    std::map<std::string, FunInfo> funs;
};

CheckedProgram typecheck_program(const Program& prog);

// Validates every inv statement along the classically resolved control flow
// (loops unrolled, C guards taken, calls inlined) for the given C-global
// overrides. Throws qimp_error with rule:
//   "inv_no_predecessor"  - nothing to undo: the lvalue was never assigned
//                           on this path, or its pending assignment happened
//                           under a different Q-guard occurrence;
//   "inv_operand_written" - an operand of the assignment being undone was
//                           overwritten in place (or itself inv-ed) since;
//   "inv_count"           - more invs than surviving assignments.
// A program whose classical part evaluates to Error (division by zero,
// out-of-bounds index, unmet loop bound) is reported via rule "run".
void check_inv(const CheckedProgram& p, uint32_t sz,
               const std::map<std::string, uval>& c_overrides = {});

}  // namespace oq::qimp
