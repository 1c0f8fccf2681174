#pragma once

// Arithmetic oracle constructors. Every oracle bundles its registers, its
// program, per-register roles, and an exact classical model used as the
// testing reference. Constructors only build programs; they never run them.
//
// Naming: the "rz" family works in the Fourier basis via phase cascades, the
// "toff" family stays in the computational basis with X/CX/CCX networks built
// from controlled bit flips, and "aqft" variants trade precision for gates.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oq/ast.hpp"
#include "oq/common.hpp"

namespace oq {

enum class VarRole : uint8_t {
    Operand,  // free input, drawn randomly by property tests
    Result,   // output register, must start at 0
    Ancilla,  // workspace, starts at 0 and must return to 0
};

const char* role_name(VarRole r);

struct OracleSpec {
    std::string name;  // registry key plus rendered parameters
    Registers regs;
    InstrPtr prog;
    std::vector<VarRole> roles;
    // Per-register draw bound for property tests: Operand values are drawn
    // uniformly below bound (0 means the full register range).
    std::vector<uval> bound;
    // Exact model: initial values for all registers (declaration order) to
    // expected final values for all registers.
    std::function<std::vector<uval>(const std::vector<uval>&)> classical;
    std::string description;
};

// ---- adders ----

// b <- a + b + carry_in (mod 2^n) in the Fourier basis; 2n qubits.
OracleSpec rz_adder(uint32_t n);
// b <- b - a (mod 2^n); same wrappers around the inverted cascade core.
OracleSpec rz_sub(uint32_t n);
// x <- x + c (mod 2^n); n qubits.
OracleSpec rz_adder_const(uint32_t n, uval c);
// x <- x - c (mod 2^n).
OracleSpec rz_sub_const(uint32_t n, uval c);
// x <- c - x (mod 2^n): bitwise complement then add c+1.
OracleSpec rz_sub_from_const(uint32_t n, uval c);
// Ripple-carry b <- a + b + c_in (mod 2^n); 2n+1 qubits.
OracleSpec toff_adder(uint32_t n);
// Ripple-carry x <- x + c (mod 2^n) via a loaded helper register; 2n+1 qubits.
OracleSpec toff_adder_const(uint32_t n, uval c);
// Approximate adder: drops the b lowest-weight controlled cascades, so it
// adds a - (a mod 2^b) exactly; circular error is at most 2^b - 1.
OracleSpec aqft_adder(uint32_t n, uint32_t drop);

// ---- comparators ----
// Forms: lt, ge, eq over two registers; lt_const, ge_const, eq_const against
// a baked constant. The target bit t is XOR-ed with the predicate.
OracleSpec comparator(uint32_t n, const std::string& form, uval c = 0);

// ---- multipliers ----
// r <- r + x*y (mod 2^n) ("qft"/"toff"), or r <- r + c*x (mod 2^n) for the
// const forms ("qft_const"/"toff_const").
OracleSpec multiplier(uint32_t n, const std::string& flavor, uval c = 0);

// ---- modular arithmetic ----
// b <- (b + c) mod N on an (n+1)-bit register with a comparison ancilla.
// Preconditions: 0 < N < 2^n, c < N, b < N.
OracleSpec mod_add_const(uint32_t n, uval c, uval N, const std::string& flavor);
// "qft": |x, 0, 0, 0> -> |x, (c * (x mod N)) mod N, 0, x div N> with
//        2^(n-1) <= N < 2^n; 2n+3 qubits.
// "toff": |x, 0, 0, 0, 0> -> |x, (c*x) mod N, (c*x) div N, 0, 0>; 5n+1 qubits.
OracleSpec mod_mult_const(uint32_t n, uval c, uval N, const std::string& flavor);

// ---- division ----
// x -> (x mod n, x div n) on N-bit values; flavors qft, aqft, toff.
OracleSpec div_mod(uint32_t N_bits, uval n, const std::string& flavor);

// ---- registry ----

struct OracleParams {
    uint32_t bits = 8;
    uval constant = 0;    // c where applicable
    uval modulus = 0;     // N where applicable
    uint32_t drop = 0;    // precision drop for aqft_adder
    std::string flavor;   // qft | toff | aqft | *_const per operator
    std::string form;     // comparator form
};

using OracleFactory = std::function<OracleSpec(const OracleParams&)>;

// Name -> factory for every operator, including flavor variants.
const std::map<std::string, OracleFactory>& oracle_registry();

// Builds an oracle by registry name; throws std::invalid_argument on unknown
// names or invalid parameters.
OracleSpec make_oracle(const std::string& name, const OracleParams& p);

// Fills in sensible defaults (constants, moduli) for a given operator at the
// requested width, so sweeps can instantiate every registry entry.
OracleParams default_params(const std::string& name, uint32_t bits);

std::vector<std::string> oracle_names();

}  // namespace oq
