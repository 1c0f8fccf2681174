#include "oq/emit.hpp"

#include "oq/invert.hpp"

namespace oq::emit {

InstrPtr phi_add_const(Var b, uint32_t width, uval val, bool subtract) {
    V out;
    for (uint32_t j = 0; j < width; ++j) {
        if ((val >> j) & 1) {
            out.push_back(subtract ? make_sri(width - 1 - j, b)
                                   : make_sr(width - 1 - j, b));
        }
    }
    if (out.empty()) out.push_back(make_skip(at(b, 0)));
    return make_seq(out);
}

InstrPtr phi_sub_const(Var b, uint32_t width, uval val) {
    return phi_add_const(b, width, val, true);
}

void phi_add_reg(V& out, Var y, uint32_t ny, Var b, uint32_t width, bool subtract) {
    for (uint32_t j = 0; j < ny && j < width; ++j) {
        InstrPtr body = subtract ? make_sri(width - 1 - j, b)
                                 : make_sr(width - 1 - j, b);
        out.push_back(make_cu(at(y, j), body));
    }
}

void load_const(V& out, Var h, uint32_t width, uval val) {
    for (uint32_t j = 0; j < width; ++j) {
        if ((val >> j) & 1) out.push_back(make_x(at(h, j)));
    }
}

void cuccaro_add(V& out, Var a, Var b, uint32_t base, uint32_t len,
                 Position carry, const CuccaroOpts& opts) {
    auto cpos = [&](uint32_t i) { return i == 0 ? carry : at(a, i - 1); };
    auto sum_write = [&](Position c, Position t) {
        return opts.ctrl ? ccx(*opts.ctrl, c, t) : cx(c, t);
    };
    for (uint32_t i = 0; i < len; ++i) {
        out.push_back(sum_write(at(a, i), at(b, base + i)));
        out.push_back(cx(at(a, i), cpos(i)));
        out.push_back(ccx(cpos(i), at(b, base + i), at(a, i)));
    }
    if (opts.carry_out) {
        out.push_back(sum_write(at(a, len - 1), at(b, base + len)));
    }
    for (uint32_t i = len; i-- > 0;) {
        out.push_back(ccx(cpos(i), at(b, base + i), at(a, i)));
        out.push_back(cx(at(a, i), cpos(i)));
        out.push_back(sum_write(cpos(i), at(b, base + i)));
    }
}

void cuccaro_sub(V& out, Var a, Var b, uint32_t base, uint32_t len,
                 Position carry, const CuccaroOpts& opts) {
    V fwd;
    cuccaro_add(fwd, a, b, base, len, carry, opts);
    out.push_back(invert(make_seq(fwd)));
}

V maj_chain(Var a, Var b, uint32_t base, uint32_t len, Position carry) {
    auto cpos = [&](uint32_t i) { return i == 0 ? carry : at(a, i - 1); };
    V out;
    for (uint32_t i = 0; i < len; ++i) {
        out.push_back(cx(at(a, i), at(b, base + i)));
        out.push_back(cx(at(a, i), cpos(i)));
        out.push_back(ccx(cpos(i), at(b, base + i), at(a, i)));
    }
    return out;
}

}  // namespace oq::emit
