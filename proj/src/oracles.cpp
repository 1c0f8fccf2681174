#include "oq/oracles.hpp"

#include <optional>
#include <stdexcept>

#include "oq/emit.hpp"
#include "oq/invert.hpp"

namespace oq {
namespace {

using namespace emit;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_width(uint32_t n) {
    require(n >= 1 && n <= 60, "register width must be between 1 and 60");
}

std::string num(uval v) { return to_string(v); }

uval low_bits(uval v, uint32_t n) { return v & mask_bits(n); }

}  // namespace

const char* role_name(VarRole r) {
    switch (r) {
        case VarRole::Operand: return "operand";
        case VarRole::Result: return "result";
        case VarRole::Ancilla: return "ancilla";
    }
    return "?";
}

// ---------------------------------------------------------------- adders

static OracleSpec rz_add_family(uint32_t n, bool subtract) {
    check_width(n);
    OracleSpec s;
    s.name = (subtract ? "rz_sub[n=" : "rz_adder[n=") + std::to_string(n) + "]";
    Var a = s.regs.add("a", n);
    Var b = s.regs.add("b", n);
    // After Rev, wire m of a carries bit n-1-m, matching the 2^(n-1-m)
    // weight of SR m on an n-bit Fourier register.
    V core;
    for (uint32_t m = 0; m < n; ++m) {
        core.push_back(make_cu(at(a, m), make_sr(m, b)));
    }
    InstrPtr mid = make_seq(core);
    if (subtract) mid = invert(mid);
    V out{make_rev(a), make_rev(b), make_qft(n, b), mid,
          make_qfti(n, b), make_rev(b), make_rev(a)};
    s.prog = make_seq(out);
    s.roles = {VarRole::Operand, VarRole::Operand};
    s.bound = {0, 0};
    s.classical = [n, subtract](const std::vector<uval>& in) {
        uval r = subtract ? in[1] - in[0] : in[1] + in[0];
        return std::vector<uval>{in[0], low_bits(r, n)};
    };
    s.description = subtract ? "b -= a (mod 2^n), Fourier-basis cascade"
                             : "b += a (mod 2^n), Fourier-basis cascade";
    return s;
}

OracleSpec rz_adder(uint32_t n) { return rz_add_family(n, false); }
OracleSpec rz_sub(uint32_t n) { return rz_add_family(n, true); }

static OracleSpec rz_const_family(uint32_t n, uval c, bool subtract) {
    check_width(n);
    c = low_bits(c, n);
    OracleSpec s;
    s.name = (subtract ? "rz_sub_const[n=" : "rz_adder_const[n=") +
             std::to_string(n) + ",c=" + num(c) + "]";
    Var x = s.regs.add("x", n);
    InstrPtr core = phi_add_const(x, n, c, subtract);
    V out{make_rev(x), make_qft(n, x), core, make_qfti(n, x), make_rev(x)};
    s.prog = make_seq(out);
    s.roles = {VarRole::Operand};
    s.bound = {0};
    s.classical = [n, c, subtract](const std::vector<uval>& in) {
        uval r = subtract ? in[0] - c : in[0] + c;
        return std::vector<uval>{low_bits(r, n)};
    };
    s.description = subtract ? "x -= c (mod 2^n)" : "x += c (mod 2^n)";
    return s;
}

OracleSpec rz_adder_const(uint32_t n, uval c) { return rz_const_family(n, c, false); }
OracleSpec rz_sub_const(uint32_t n, uval c) { return rz_const_family(n, c, true); }

OracleSpec rz_sub_from_const(uint32_t n, uval c) {
    check_width(n);
    c = low_bits(c, n);
    OracleSpec s;
    s.name = "rz_sub_from_const[n=" + std::to_string(n) + ",c=" + num(c) + "]";
    Var x = s.regs.add("x", n);
    // c - x = ~x + c + 1 (mod 2^n)
    V out;
    for (uint32_t j = 0; j < n; ++j) out.push_back(make_x(at(x, j)));
    out.push_back(make_rev(x));
    out.push_back(make_qft(n, x));
    out.push_back(phi_add_const(x, n, low_bits(c + 1, n)));
    out.push_back(make_qfti(n, x));
    out.push_back(make_rev(x));
    s.prog = make_seq(out);
    s.roles = {VarRole::Operand};
    s.bound = {0};
    s.classical = [n, c](const std::vector<uval>& in) {
        return std::vector<uval>{low_bits(c - in[0], n)};
    };
    s.description = "x <- c - x (mod 2^n): complement then add c+1";
    return s;
}

OracleSpec toff_adder(uint32_t n) {
    check_width(n);
    OracleSpec s;
    s.name = "toff_adder[n=" + std::to_string(n) + "]";
    Var a = s.regs.add("a", n);
    Var b = s.regs.add("b", n);
    Var cin = s.regs.add("cin", 1);
    V out;
    cuccaro_add(out, a, b, 0, n, at(cin, 0));
    s.prog = make_seq(out);
    s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Operand};
    s.bound = {0, 0, 2};
    s.classical = [n](const std::vector<uval>& in) {
        return std::vector<uval>{in[0], low_bits(in[1] + in[0] + in[2], n), in[2]};
    };
    s.description = "b += a + cin (mod 2^n), ripple-carry";
    return s;
}

OracleSpec toff_adder_const(uint32_t n, uval c) {
    check_width(n);
    c = low_bits(c, n);
    OracleSpec s;
    s.name = "toff_adder_const[n=" + std::to_string(n) + ",c=" + num(c) + "]";
    Var x = s.regs.add("x", n);
    Var h = s.regs.add("h", n);
    Var cin = s.regs.add("cin", 1);
    V out;
    load_const(out, h, n, c);
    cuccaro_add(out, h, x, 0, n, at(cin, 0));
    load_const(out, h, n, c);
    if (out.empty()) out.push_back(make_skip(at(x, 0)));
    s.prog = make_seq(out);
    s.roles = {VarRole::Operand, VarRole::Ancilla, VarRole::Ancilla};
    s.bound = {0, 1, 1};
    s.classical = [n, c](const std::vector<uval>& in) {
        return std::vector<uval>{low_bits(in[0] + c, n), 0, 0};
    };
    s.description = "x += c (mod 2^n) via loaded helper register";
    return s;
}

OracleSpec aqft_adder(uint32_t n, uint32_t drop) {
    check_width(n);
    require(drop <= n, "aqft_adder: drop must not exceed the register width");
    OracleSpec s;
    s.name = "aqft_adder[n=" + std::to_string(n) + ",drop=" + std::to_string(drop) + "]";
    Var a = s.regs.add("a", n);
    Var b = s.regs.add("b", n);
    V core;
    for (uint32_t m = 0; m < n; ++m) {
        if (m + drop < n) {
            core.push_back(make_cu(at(a, m), make_sr(m, b)));
        } else {
            // dropped low-weight cascade; keep the slot visible
            core.push_back(make_skip(at(a, m)));
        }
    }
    V out{make_rev(a), make_rev(b), make_qft(n, b), make_seq(core),
          make_qfti(n, b), make_rev(b), make_rev(a)};
    s.prog = make_seq(out);
    s.roles = {VarRole::Operand, VarRole::Operand};
    s.bound = {0, 0};
    s.classical = [n, drop](const std::vector<uval>& in) {
        uval kept = in[0] & ~mask_bits(drop);
        return std::vector<uval>{in[0], low_bits(in[1] + kept, n)};
    };
    s.description = "b += a - (a mod 2^drop): adder with low cascades dropped";
    return s;
}

// ------------------------------------------------------------ comparators

OracleSpec comparator(uint32_t n, const std::string& form, uval c) {
    check_width(n);
    OracleSpec s;
    const bool is_const = form == "lt_const" || form == "ge_const" || form == "eq_const";
    c = low_bits(c, n);
    s.name = "comparator_" + form + "[n=" + std::to_string(n) +
             (is_const ? ",c=" + num(c) : "") + "]";

    if (form == "lt" || form == "ge") {
        Var x = s.regs.add("x", n);
        Var y = s.regs.add("y", n);
        Var t = s.regs.add("t", 1);
        Var sc = s.regs.add("s", n + 1);
        const uint32_t w = n + 1;
        V out;
        for (uint32_t j = 0; j < n; ++j) out.push_back(cx(at(x, j), at(sc, j)));
        out.push_back(make_rev(sc));
        out.push_back(make_qft(w, sc));
        phi_add_reg(out, y, n, sc, w, true);  // s = x - y, sign in the top bit
        out.push_back(make_qfti(w, sc));
        out.push_back(cx(at(sc, 0), at(t, 0)));
        out.push_back(make_qft(w, sc));
        phi_add_reg(out, y, n, sc, w, false);
        phi_add_reg(out, x, n, sc, w, true);  // drain s back to zero
        out.push_back(make_qfti(w, sc));
        out.push_back(make_rev(sc));
        if (form == "ge") out.push_back(make_x(at(t, 0)));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Operand, VarRole::Ancilla};
        s.bound = {0, 0, 2, 1};
        const bool ge = form == "ge";
        s.classical = [ge](const std::vector<uval>& in) {
            uval pred = ge ? (in[0] >= in[1] ? 1 : 0) : (in[0] < in[1] ? 1 : 0);
            return std::vector<uval>{in[0], in[1], in[2] ^ pred, 0};
        };
        s.description = "t ^= [x " + std::string(ge ? ">=" : "<") + " y] via sign of x-y";
        return s;
    }

    if (form == "lt_const" || form == "ge_const") {
        Var x = s.regs.add("x", n);
        Var t = s.regs.add("t", 1);
        Var sc = s.regs.add("s", n + 1);
        const uint32_t w = n + 1;
        V out;
        for (uint32_t j = 0; j < n; ++j) out.push_back(cx(at(x, j), at(sc, j)));
        out.push_back(make_rev(sc));
        out.push_back(make_qft(w, sc));
        out.push_back(phi_sub_const(sc, w, c));
        out.push_back(make_qfti(w, sc));
        out.push_back(cx(at(sc, 0), at(t, 0)));
        out.push_back(make_qft(w, sc));
        out.push_back(phi_add_const(sc, w, c));
        phi_add_reg(out, x, n, sc, w, true);
        out.push_back(make_qfti(w, sc));
        out.push_back(make_rev(sc));
        if (form == "ge_const") out.push_back(make_x(at(t, 0)));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Ancilla};
        s.bound = {0, 2, 1};
        const bool ge = form == "ge_const";
        s.classical = [ge, c](const std::vector<uval>& in) {
            uval pred = ge ? (in[0] >= c ? 1 : 0) : (in[0] < c ? 1 : 0);
            return std::vector<uval>{in[0], in[1] ^ pred, 0};
        };
        s.description = "t ^= [x " + std::string(ge ? ">=" : "<") + " c]";
        return s;
    }

    if (form == "eq") {
        Var x = s.regs.add("x", n);
        Var y = s.regs.add("y", n);
        Var t = s.regs.add("t", 1);
        Var sc = s.regs.add("s", n);
        Var k = n >= 2 ? s.regs.add("k", n - 1) : 0;
        V fwd;
        for (uint32_t j = 0; j < n; ++j) {
            fwd.push_back(cx(at(x, j), at(sc, j)));
            fwd.push_back(cx(at(y, j), at(sc, j)));
        }
        for (uint32_t j = 0; j < n; ++j) fwd.push_back(make_x(at(sc, j)));
        V chain;
        if (n >= 2) {
            chain.push_back(ccx(at(sc, 0), at(sc, 1), at(k, 0)));
            for (uint32_t j = 2; j < n; ++j) {
                chain.push_back(ccx(at(k, j - 2), at(sc, j), at(k, j - 1)));
            }
        }
        Position all_eq = n >= 2 ? at(k, n - 2) : at(sc, 0);
        V out = fwd;
        out.insert(out.end(), chain.begin(), chain.end());
        out.push_back(cx(all_eq, at(t, 0)));
        out.push_back(invert(make_seq(chain.empty() ? V{make_skip(at(sc, 0))} : chain)));
        out.push_back(invert(make_seq(fwd)));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Operand, VarRole::Ancilla};
        s.bound = {0, 0, 2, 1};
        if (n >= 2) {
            s.roles.push_back(VarRole::Ancilla);
            s.bound.push_back(1);
        }
        const size_t vars = s.roles.size();
        s.classical = [vars](const std::vector<uval>& in) {
            std::vector<uval> r(vars, 0);
            r[0] = in[0];
            r[1] = in[1];
            r[2] = in[2] ^ (in[0] == in[1] ? 1 : 0);
            return r;
        };
        s.description = "t ^= [x == y] via XOR then AND chain";
        return s;
    }

    if (form == "eq_const") {
        Var x = s.regs.add("x", n);
        Var t = s.regs.add("t", 1);
        Var k = n >= 2 ? s.regs.add("k", n - 1) : 0;
        V fwd;
        for (uint32_t j = 0; j < n; ++j) {
            if (((c >> j) & 1) == 0) fwd.push_back(make_x(at(x, j)));
        }
        V chain;
        if (n >= 2) {
            chain.push_back(ccx(at(x, 0), at(x, 1), at(k, 0)));
            for (uint32_t j = 2; j < n; ++j) {
                chain.push_back(ccx(at(k, j - 2), at(x, j), at(k, j - 1)));
            }
        }
        Position all_eq = n >= 2 ? at(k, n - 2) : at(x, 0);
        V out = fwd.empty() ? V{make_skip(at(x, 0))} : fwd;
        out.insert(out.end(), chain.begin(), chain.end());
        out.push_back(cx(all_eq, at(t, 0)));
        out.push_back(invert(make_seq(chain.empty() ? V{make_skip(at(x, 0))} : chain)));
        out.push_back(invert(make_seq(fwd.empty() ? V{make_skip(at(x, 0))} : fwd)));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand};
        s.bound = {0, 2};
        if (n >= 2) {
            s.roles.push_back(VarRole::Ancilla);
            s.bound.push_back(1);
        }
        const size_t vars = s.roles.size();
        s.classical = [vars, c](const std::vector<uval>& in) {
            std::vector<uval> r(vars, 0);
            r[0] = in[0];
            r[1] = in[1] ^ (in[0] == c ? 1 : 0);
            return r;
        };
        s.description = "t ^= [x == c] via AND chain over flipped bits";
        return s;
    }

    throw std::invalid_argument("comparator: unknown form '" + form + "'");
}

// ------------------------------------------------------------ multipliers

OracleSpec multiplier(uint32_t n, const std::string& flavor, uval c) {
    check_width(n);
    OracleSpec s;

    if (flavor == "qft") {
        s.name = "multiplier_qft[n=" + std::to_string(n) + "]";
        Var x = s.regs.add("x", n);
        Var y = s.regs.add("y", n);
        Var r = s.regs.add("r", n);
        V out{make_rev(r), make_qft(n, r)};
        for (uint32_t k = 0; k < n; ++k) {
            for (uint32_t m = 0; m + k < n; ++m) {
                // weight 2^(m+k) -> SR index n-1-m-k, doubly controlled
                out.push_back(make_cu(at(y, k),
                                      make_cu(at(x, m), make_sr(n - 1 - m - k, r))));
            }
        }
        out.push_back(make_qfti(n, r));
        out.push_back(make_rev(r));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Operand};
        s.bound = {0, 0, 0};
        s.classical = [n](const std::vector<uval>& in) {
            return std::vector<uval>{in[0], in[1], low_bits(in[2] + in[0] * in[1], n)};
        };
        s.description = "r += x*y (mod 2^n), doubly controlled cascades";
        return s;
    }

    if (flavor == "qft_const") {
        c = low_bits(c, n);
        s.name = "multiplier_qft_const[n=" + std::to_string(n) + ",c=" + num(c) + "]";
        Var x = s.regs.add("x", n);
        Var r = s.regs.add("r", n);
        V out{make_rev(r), make_qft(n, r)};
        for (uint32_t m = 0; m < n; ++m) {
            uval term = low_bits(c << m, n);
            if (term == 0) continue;
            out.push_back(make_cu(at(x, m), phi_add_const(r, n, term)));
        }
        out.push_back(make_qfti(n, r));
        out.push_back(make_rev(r));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand};
        s.bound = {0, 0};
        s.classical = [n, c](const std::vector<uval>& in) {
            return std::vector<uval>{in[0], low_bits(in[1] + c * in[0], n)};
        };
        s.description = "r += c*x (mod 2^n), one cascade per operand bit";
        return s;
    }

    if (flavor == "toff") {
        s.name = "multiplier_toff[n=" + std::to_string(n) + "]";
        Var x = s.regs.add("x", n);
        Var y = s.regs.add("y", n);
        Var r = s.regs.add("r", n);
        Var cin = s.regs.add("cin", 1);
        V out;
        for (uint32_t k = 0; k < n; ++k) {
            CuccaroOpts o;
            o.ctrl = at(y, k);
            cuccaro_add(out, x, r, k, n - k, at(cin, 0), o);
        }
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Operand, VarRole::Ancilla};
        s.bound = {0, 0, 0, 1};
        s.classical = [n](const std::vector<uval>& in) {
            return std::vector<uval>{in[0], in[1],
                                     low_bits(in[2] + in[0] * in[1], n), 0};
        };
        s.description = "r += x*y (mod 2^n), shifted controlled ripple adders";
        return s;
    }

    if (flavor == "toff_const") {
        c = low_bits(c, n);
        s.name = "multiplier_toff_const[n=" + std::to_string(n) + ",c=" + num(c) + "]";
        Var x = s.regs.add("x", n);
        Var r = s.regs.add("r", n);
        Var cin = s.regs.add("cin", 1);
        V out;
        for (uint32_t j = 0; j < n; ++j) {
            if ((c >> j) & 1) cuccaro_add(out, x, r, j, n - j, at(cin, 0));
        }
        if (out.empty()) out.push_back(make_skip(at(r, 0)));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Operand, VarRole::Ancilla};
        s.bound = {0, 0, 1};
        s.classical = [n, c](const std::vector<uval>& in) {
            return std::vector<uval>{in[0], low_bits(in[1] + c * in[0], n), 0};
        };
        s.description = "r += c*x (mod 2^n), shifted ripple adders per set bit";
        return s;
    }

    throw std::invalid_argument("multiplier: unknown flavor '" + flavor + "'");
}

// ------------------------------------------------------- modular addition

OracleSpec mod_add_const(uint32_t n, uval c, uval N, const std::string& flavor) {
    check_width(n);
    require(N >= 1 && N <= mask_bits(n), "mod_add_const: need 0 < N < 2^n");
    require(c < N, "mod_add_const: need c < N");
    OracleSpec s;
    s.name = "mod_add_const_" + flavor + "[n=" + std::to_string(n) +
             ",c=" + num(c) + ",N=" + num(N) + "]";
    const uint32_t w = n + 1;

    if (flavor == "qft") {
        Var b = s.regs.add("b", w);
        Var anc = s.regs.add("anc", 1);
        V out;
        out.push_back(make_rev(b));
        out.push_back(make_qft(w, b));
        out.push_back(phi_add_const(b, w, c));
        out.push_back(phi_sub_const(b, w, N));
        out.push_back(make_qfti(w, b));
        out.push_back(cx(at(b, 0), at(anc, 0)));  // sign of b + c - N
        out.push_back(make_qft(w, b));
        out.push_back(make_cu(at(anc, 0), phi_add_const(b, w, N)));
        out.push_back(phi_sub_const(b, w, c));
        out.push_back(make_qfti(w, b));
        // ancilla cleanup: (b+c) mod N >= c  iff  b + c < N
        out.push_back(make_x(at(b, 0)));
        out.push_back(cx(at(b, 0), at(anc, 0)));
        out.push_back(make_x(at(b, 0)));
        out.push_back(make_qft(w, b));
        out.push_back(phi_add_const(b, w, c));
        out.push_back(make_qfti(w, b));
        out.push_back(make_rev(b));
        s.prog = make_seq(out);
    } else if (flavor == "toff") {
        Var b = s.regs.add("b", w);
        Var anc = s.regs.add("anc", 1);
        Var h = s.regs.add("h", w);
        Var cin = s.regs.add("cin", 1);
        auto addc = [&](V& out, uval v) {
            load_const(out, h, w, v);
            cuccaro_add(out, h, b, 0, w, at(cin, 0));
            load_const(out, h, w, v);
        };
        auto subc = [&](V& out, uval v) {
            load_const(out, h, w, v);
            cuccaro_sub(out, h, b, 0, w, at(cin, 0));
            load_const(out, h, w, v);
        };
        auto ctrl_addc = [&](V& out, uval v, Position ctrl) {
            load_const(out, h, w, v);
            CuccaroOpts o;
            o.ctrl = ctrl;
            cuccaro_add(out, h, b, 0, w, at(cin, 0), o);
            load_const(out, h, w, v);
        };
        V out;
        addc(out, c);
        subc(out, N);
        out.push_back(cx(at(b, n), at(anc, 0)));
        ctrl_addc(out, N, at(anc, 0));
        subc(out, c);
        out.push_back(make_x(at(b, n)));
        out.push_back(cx(at(b, n), at(anc, 0)));
        out.push_back(make_x(at(b, n)));
        addc(out, c);
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Ancilla, VarRole::Ancilla, VarRole::Ancilla};
        s.bound = {N, 1, 1, 1};
    } else {
        throw std::invalid_argument("mod_add_const: unknown flavor '" + flavor + "'");
    }

    if (flavor == "qft") {
        s.roles = {VarRole::Operand, VarRole::Ancilla};
        s.bound = {N, 1};
    }
    const size_t vars = s.roles.size();
    s.classical = [vars, c, N](const std::vector<uval>& in) {
        std::vector<uval> r(vars, 0);
        r[0] = (in[0] + c) % N;
        return r;
    };
    s.description = "b <- (b + c) mod N via add, compare, conditional re-add";
    return s;
}

// ------------------------------------------------- modular multiplication

OracleSpec mod_mult_const(uint32_t n, uval c, uval N, const std::string& flavor) {
    check_width(n);
    require(N >= 1 && N <= mask_bits(n), "mod_mult_const: need 0 < N < 2^n");
    require(c >= 1 && c < N, "mod_mult_const: need 0 < c < N");
    OracleSpec s;
    s.name = "mod_mult_const_" + flavor + "[n=" + std::to_string(n) +
             ",c=" + num(c) + ",N=" + num(N) + "]";

    if (flavor == "qft") {
        require(2 * N > mask_bits(n),
                "mod_mult_const qft: need 2^(n-1) <= N so one subtraction reduces x");
        const uint32_t w = n + 1;
        Var x = s.regs.add("x", n);
        Var b = s.regs.add("b", w);
        Var anc = s.regs.add("anc", 1);
        Var cmp = s.regs.add("cmp", 1);
        V out;
        // stage 1: cmp ^= [x >= N], using b as comparison scratch
        for (uint32_t j = 0; j < n; ++j) out.push_back(cx(at(x, j), at(b, j)));
        out.push_back(make_rev(b));
        out.push_back(make_qft(w, b));
        out.push_back(phi_sub_const(b, w, N));
        out.push_back(make_qfti(w, b));
        out.push_back(make_x(at(b, 0)));
        out.push_back(cx(at(b, 0), at(cmp, 0)));
        out.push_back(make_x(at(b, 0)));
        out.push_back(make_qft(w, b));
        out.push_back(phi_add_const(b, w, N));
        phi_add_reg(out, x, n, b, w, true);  // drain the copy back to zero
        out.push_back(make_qfti(w, b));
        out.push_back(make_rev(b));
        // stage 2: x -= N when cmp, so x now holds x mod N
        out.push_back(make_rev(x));
        out.push_back(make_qft(n, x));
        out.push_back(make_cu(at(cmp, 0), phi_sub_const(x, n, N)));
        out.push_back(make_qfti(n, x));
        out.push_back(make_rev(x));
        // stage 3: b accumulates sum of (c*2^k mod N) over set bits of x,
        // each step reduced mod N with the ancilla-tracked re-add
        out.push_back(make_rev(b));
        out.push_back(make_qft(w, b));
        for (uint32_t k = 0; k < n; ++k) {
            const uval ck = (c << k) % N;
            if (ck != 0) out.push_back(make_cu(at(x, k), phi_add_const(b, w, ck)));
            out.push_back(phi_sub_const(b, w, N));
            out.push_back(make_qfti(w, b));
            out.push_back(cx(at(b, 0), at(anc, 0)));
            out.push_back(make_qft(w, b));
            out.push_back(make_cu(at(anc, 0), phi_add_const(b, w, N)));
            if (ck != 0) out.push_back(make_cu(at(x, k), phi_sub_const(b, w, ck)));
            out.push_back(make_qfti(w, b));
            out.push_back(make_x(at(b, 0)));
            out.push_back(cx(at(b, 0), at(anc, 0)));
            out.push_back(make_x(at(b, 0)));
            out.push_back(make_qft(w, b));
            if (ck != 0) out.push_back(make_cu(at(x, k), phi_add_const(b, w, ck)));
        }
        out.push_back(make_qfti(w, b));
        out.push_back(make_rev(b));
        // stage 4: restore x
        out.push_back(make_rev(x));
        out.push_back(make_qft(n, x));
        out.push_back(make_cu(at(cmp, 0), phi_add_const(x, n, N)));
        out.push_back(make_qfti(n, x));
        out.push_back(make_rev(x));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Result, VarRole::Ancilla, VarRole::Result};
        s.bound = {0, 1, 1, 1};
        s.classical = [c, N](const std::vector<uval>& in) {
            uval xr = in[0] % N;
            return std::vector<uval>{in[0], (in[1] + c * xr) % N, 0,
                                     in[3] ^ (in[0] >= N ? 1 : 0)};
        };
        s.description =
            "b <- c*(x mod N) mod N; cmp records the quotient bit of x by N";
        return s;
    }

    if (flavor == "toff") {
        Var x = s.regs.add("x", n);
        Var prod = s.regs.add("prod", 2 * n);
        Var q = s.regs.add("q", n);
        Var h = s.regs.add("h", n);
        Var cin = s.regs.add("cin", 1);
        V out;
        // stage A: prod <- c*x exactly, ascending shifted adds with carry-out
        for (uint32_t j = 0; j < n; ++j) {
            if (((c >> j) & 1) == 0) continue;
            CuccaroOpts o;
            o.carry_out = true;
            cuccaro_add(out, x, prod, j, n, at(cin, 0), o);
        }
        // stage B: restoring division of prod by N; quotient bit i decides a
        // subtraction of N from the (n+1)-bit window at offset i
        const uval notN = (~N) & mask_bits(n);
        for (uint32_t i = n; i-- > 0;) {
            // compare: q[i] ^= [window >= N], window = prod[i .. n+i]
            load_const(out, h, n, notN);
            out.push_back(make_x(at(cin, 0)));
            V chain = maj_chain(h, prod, i, n, at(cin, 0));
            out.insert(out.end(), chain.begin(), chain.end());
            out.push_back(make_x(at(prod, n + i)));
            out.push_back(make_x(at(h, n - 1)));
            out.push_back(ccx(at(prod, n + i), at(h, n - 1), at(q, i)));
            out.push_back(make_x(at(h, n - 1)));
            out.push_back(make_x(at(prod, n + i)));
            out.push_back(make_x(at(q, i)));
            out.push_back(invert(make_seq(chain)));
            out.push_back(make_x(at(cin, 0)));
            load_const(out, h, n, notN);
            // subtract when the quotient bit fired
            load_const(out, h, n, N);
            CuccaroOpts o;
            o.ctrl = at(q, i);
            o.carry_out = true;
            cuccaro_sub(out, h, prod, i, n, at(cin, 0), o);
            load_const(out, h, n, N);
        }
        if (out.empty()) out.push_back(make_skip(at(prod, 0)));
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Result, VarRole::Result,
                   VarRole::Ancilla, VarRole::Ancilla};
        s.bound = {0, 1, 1, 1, 1};
        s.classical = [c, N](const std::vector<uval>& in) {
            uval prod_v = c * in[0];
            return std::vector<uval>{in[0], prod_v % N, prod_v / N, 0, 0};
        };
        s.description = "prod <- (c*x) mod N with quotient register, via "
                        "exact product then restoring division";
        return s;
    }

    throw std::invalid_argument("mod_mult_const: unknown flavor '" + flavor + "'");
}

// ---------------------------------------------------------------- division

OracleSpec div_mod(uint32_t N_bits, uval n, const std::string& flavor) {
    check_width(N_bits);
    require(n >= 1, "div_mod: divisor must be positive");
    OracleSpec s;
    s.name = "div_mod_" + flavor + "[N=" + std::to_string(N_bits) + ",n=" + num(n) + "]";

    // iterations subtract n*2^(I-i); I is the largest shift keeping the
    // subtrahend representable in N_bits
    bool any = n <= mask_bits(N_bits);
    uint32_t I = 0;
    if (any) {
        while ((n << (I + 1)) <= mask_bits(N_bits)) ++I;
    }

    if (flavor == "qft" || flavor == "aqft") {
        const uint32_t sz = N_bits + 1;
        Var x = s.regs.add("x", sz);
        Var q = s.regs.add("q", sz);
        V out;
        if (!any) {
            out.push_back(make_skip(at(x, 0)));
        } else if (flavor == "qft") {
            for (uint32_t i = 0; i <= I; ++i) {
                const uval d = n << (I - i);
                out.push_back(make_rev(x));
                out.push_back(make_qft(sz, x));
                out.push_back(phi_sub_const(x, sz, d));
                out.push_back(make_qfti(sz, x));
                out.push_back(make_rev(x));
                out.push_back(cx(at(x, N_bits), at(q, I - i)));
                out.push_back(make_rev(x));
                out.push_back(make_qft(sz, x));
                out.push_back(make_cu(at(q, I - i), phi_add_const(x, sz, d)));
                out.push_back(make_qfti(sz, x));
                out.push_back(make_rev(x));
                out.push_back(make_x(at(q, I - i)));
            }
        } else {
            // aqft: the live window shrinks by one wire per round once the
            // value provably fits, and each retired wire rotates to the tail
            uint32_t shifts = 0;
            out.push_back(make_rev(x));
            for (uint32_t i = 0; i <= I; ++i) {
                const uint32_t w = (i == 0) ? sz : (N_bits + 2 - i);
                const uval d = n << (I - i);
                out.push_back(make_qft(w, x));
                out.push_back(phi_sub_const(x, w, d));
                out.push_back(make_qfti(w, x));
                out.push_back(cx(at(x, 0), at(q, I - i)));
                out.push_back(make_qft(w, x));
                out.push_back(make_cu(at(q, I - i), phi_add_const(x, w, d)));
                out.push_back(make_qfti(w, x));
                out.push_back(make_x(at(q, I - i)));
                if (i < I && N_bits + 1 - i < w) {
                    out.push_back(make_lshift(x));
                    ++shifts;
                }
            }
            out.push_back(make_rev(x));
            for (uint32_t t = 0; t < shifts; ++t) out.push_back(make_lshift(x));
        }
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Result};
        s.bound = {pow2(N_bits), 1};
        s.classical = [n](const std::vector<uval>& in) {
            return std::vector<uval>{in[0] % n, in[0] / n};
        };
        s.description = flavor == "qft"
                            ? "x -> (x mod n, x div n), restoring division in "
                              "the Fourier basis"
                            : "x -> (x mod n, x div n), shrinking-window "
                              "Fourier division";
        return s;
    }

    if (flavor == "toff") {
        Var x = s.regs.add("x", N_bits);
        Var h = s.regs.add("h", N_bits);
        Var q = s.regs.add("q", N_bits);
        Var cin = s.regs.add("cin", 1);
        V out;
        if (!any) {
            out.push_back(make_skip(at(x, 0)));
        } else {
            for (uint32_t i = 0; i <= I; ++i) {
                const uval d = n << (I - i);
                const uval notd = (~d) & mask_bits(N_bits);
                // q[I-i] ^= [x >= d] via the carry of x + ~d + 1
                load_const(out, h, N_bits, notd);
                out.push_back(make_x(at(cin, 0)));
                V chain = maj_chain(h, x, 0, N_bits, at(cin, 0));
                out.insert(out.end(), chain.begin(), chain.end());
                out.push_back(cx(at(h, N_bits - 1), at(q, I - i)));
                out.push_back(invert(make_seq(chain)));
                out.push_back(make_x(at(cin, 0)));
                load_const(out, h, N_bits, notd);
                // x -= d when the quotient bit fired (never wraps)
                load_const(out, h, N_bits, d);
                CuccaroOpts o;
                o.ctrl = at(q, I - i);
                cuccaro_sub(out, h, x, 0, N_bits, at(cin, 0), o);
                load_const(out, h, N_bits, d);
            }
        }
        s.prog = make_seq(out);
        s.roles = {VarRole::Operand, VarRole::Ancilla, VarRole::Result, VarRole::Ancilla};
        s.bound = {0, 1, 1, 1};
        s.classical = [n](const std::vector<uval>& in) {
            return std::vector<uval>{in[0] % n, 0, in[0] / n, 0};
        };
        s.description = "x -> (x mod n, x div n), compare-then-subtract "
                        "ripple arithmetic";
        return s;
    }

    throw std::invalid_argument("div_mod: unknown flavor '" + flavor + "'");
}

// ---------------------------------------------------------------- registry

const std::map<std::string, OracleFactory>& oracle_registry() {
    static const std::map<std::string, OracleFactory> reg = {
        {"rz_adder", [](const OracleParams& p) { return rz_adder(p.bits); }},
        {"rz_sub", [](const OracleParams& p) { return rz_sub(p.bits); }},
        {"rz_adder_const",
         [](const OracleParams& p) { return rz_adder_const(p.bits, p.constant); }},
        {"rz_sub_const",
         [](const OracleParams& p) { return rz_sub_const(p.bits, p.constant); }},
        {"rz_sub_from_const",
         [](const OracleParams& p) { return rz_sub_from_const(p.bits, p.constant); }},
        {"toff_adder", [](const OracleParams& p) { return toff_adder(p.bits); }},
        {"toff_adder_const",
         [](const OracleParams& p) { return toff_adder_const(p.bits, p.constant); }},
        {"aqft_adder",
         [](const OracleParams& p) { return aqft_adder(p.bits, p.drop); }},
        {"comparator_lt",
         [](const OracleParams& p) { return comparator(p.bits, "lt"); }},
        {"comparator_ge",
         [](const OracleParams& p) { return comparator(p.bits, "ge"); }},
        {"comparator_eq",
         [](const OracleParams& p) { return comparator(p.bits, "eq"); }},
        {"comparator_lt_const",
         [](const OracleParams& p) { return comparator(p.bits, "lt_const", p.constant); }},
        {"comparator_ge_const",
         [](const OracleParams& p) { return comparator(p.bits, "ge_const", p.constant); }},
        {"comparator_eq_const",
         [](const OracleParams& p) { return comparator(p.bits, "eq_const", p.constant); }},
        {"multiplier_qft",
         [](const OracleParams& p) { return multiplier(p.bits, "qft"); }},
        {"multiplier_toff",
         [](const OracleParams& p) { return multiplier(p.bits, "toff"); }},
        {"multiplier_qft_const",
         [](const OracleParams& p) { return multiplier(p.bits, "qft_const", p.constant); }},
        {"multiplier_toff_const",
         [](const OracleParams& p) { return multiplier(p.bits, "toff_const", p.constant); }},
        {"mod_add_const_qft",
         [](const OracleParams& p) {
             return mod_add_const(p.bits, p.constant, p.modulus, "qft");
         }},
        {"mod_add_const_toff",
         [](const OracleParams& p) {
             return mod_add_const(p.bits, p.constant, p.modulus, "toff");
         }},
        {"mod_mult_const_qft",
         [](const OracleParams& p) {
             return mod_mult_const(p.bits, p.constant, p.modulus, "qft");
         }},
        {"mod_mult_const_toff",
         [](const OracleParams& p) {
             return mod_mult_const(p.bits, p.constant, p.modulus, "toff");
         }},
        {"div_mod_qft",
         [](const OracleParams& p) { return div_mod(p.bits, p.modulus, "qft"); }},
        {"div_mod_aqft",
         [](const OracleParams& p) { return div_mod(p.bits, p.modulus, "aqft"); }},
        {"div_mod_toff",
         [](const OracleParams& p) { return div_mod(p.bits, p.modulus, "toff"); }},
    };
    return reg;
}

OracleSpec make_oracle(const std::string& name, const OracleParams& p) {
    const auto& reg = oracle_registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        throw std::invalid_argument("unknown oracle '" + name + "'");
    }
    return it->second(p);
}

OracleParams default_params(const std::string& name, uint32_t bits) {
    OracleParams p;
    p.bits = bits;
    const uval full = mask_bits(bits);
    p.constant = (pow2(bits) * 5 / 8 + 1) & full;
    if (p.constant == 0) p.constant = 1;
    p.drop = bits / 4 > 0 ? bits / 4 : 1;
    if (p.drop > bits) p.drop = bits;
    if (name.rfind("mod_", 0) == 0) {
        p.modulus = full;  // 2^bits - 1: odd and at least 2^(bits-1)
        p.constant = (p.modulus * 2 / 3 + 1) % p.modulus;
        if (p.constant == 0) p.constant = 1;
    } else if (name.rfind("div_mod", 0) == 0) {
        uint32_t half = bits / 2 > 0 ? bits / 2 : 1;
        p.modulus = pow2(half) - 1;
        if (p.modulus < 2) p.modulus = 2;
        if (p.modulus > full) p.modulus = full;
    }
    return p;
}

std::vector<std::string> oracle_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : oracle_registry()) {
        (void)v;
        out.push_back(k);
    }
    return out;
}

}  // namespace oq
