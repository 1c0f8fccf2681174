#pragma once

// Bit-level arithmetic shared by the reference interpreter, the compiler's
// constant store, and test references. All values are sz-bit words:
// nat = unsigned mod 2^sz; fixedp = two's-complement numerator m with value
// m / 2^(sz-1) in [-1, 1); bool = one bit.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oq/common.hpp"
#include "oq/qimp_ast.hpp"

namespace oq::qimp {

inline uval word_mask(uint32_t sz) { return mask_bits(sz); }

// Decimal fixedp literal ("0.25", "-0.125") scaled to a numerator at sz
// bits, round-to-nearest, exact integer arithmetic. Throws qimp_error if
// the magnitude rounds outside [-1, 1) or the literal is malformed.
uval scale_fixed_literal(const std::string& text, uint32_t sz, int line);

// The fixedp product: floor((s1 * s2) / 2^(sz-1)) mod 2^sz where s1, s2
// are the two's-complement readings of the numerators. Values outside
// [-1, 1) wrap mod 2^sz like every other operation.
uval fx_mul(uval m1, uval m2, uint32_t sz);

// Division by a nonzero constant: floor(v / d), shared by nat and fixedp
// (fixedp divides the numerator, i.e. the value by a nat constant).
uval div_floor(uval v, uval d);

// Signed (two's-complement) comparison helpers for fixedp.
bool fx_lt(uval a, uval b, uint32_t sz);

// Apply a C-mode / reference-level binary operator at a given base and
// width; divisor-zero returns nullopt. Comparison operators return 0/1.
std::optional<uval> apply_bop(Bop op, Base base, uval a, uval b, uint32_t sz);

// pow(a, b) mod 2^sz by repeated squaring.
uval pow_word(uval a, uval b, uint32_t sz);

// Compile-time builtin functions, all over C-mode nat arguments:
//   pow(a, b)  -> nat     a^b mod 2^sz
//   frac(a, b) -> fixedp  the value a/b, floor-scaled; requires a < b
//   even(a)    -> bool
//   odd(a)     -> bool
// frac is the explicit nat-to-fixedp conversion (there is no implicit one).
struct BuiltinSig {
    int arity;
    Base result;
};
const std::map<std::string, BuiltinSig>& builtin_sigs();

// nullopt on a domain error (frac with b == 0 or a >= b).
std::optional<uval> eval_builtin(const std::string& name,
                                 const std::vector<uval>& args, uint32_t sz);

}  // namespace oq::qimp
