#include "oq/lower.hpp"

namespace oq {

namespace {

void lower_crzk(uint32_t k, uint32_t c, uint32_t t, bool inv, std::vector<Gate>& out) {
    // Controlled dyadic phase from half-angle rotations and CX conjugation.
    if (k + 1 > 127) throw translate_error("rotation exponent overflow in lowering");
    if (!inv) {
        out.push_back(g_rzk(k + 1, t));
        out.push_back(g_cx(c, t));
        out.push_back(g_rzki(k + 1, t));
        out.push_back(g_cx(c, t));
        out.push_back(g_rzk(k + 1, c));
    } else {
        out.push_back(g_rzki(k + 1, t));
        out.push_back(g_cx(c, t));
        out.push_back(g_rzk(k + 1, t));
        out.push_back(g_cx(c, t));
        out.push_back(g_rzki(k + 1, c));
    }
}

void lower_ccx(uint32_t a, uint32_t b, uint32_t c, std::vector<Gate>& out) {
    // Standard 15-gate network; T = RZk(3), Tdg = RZkInv(3).
    out.push_back(g_h(c));
    out.push_back(g_cx(b, c));
    out.push_back(g_rzki(3, c));
    out.push_back(g_cx(a, c));
    out.push_back(g_rzk(3, c));
    out.push_back(g_cx(b, c));
    out.push_back(g_rzki(3, c));
    out.push_back(g_cx(a, c));
    out.push_back(g_rzk(3, b));
    out.push_back(g_rzk(3, c));
    out.push_back(g_h(c));
    out.push_back(g_cx(a, b));
    out.push_back(g_rzk(3, a));
    out.push_back(g_rzki(3, b));
    out.push_back(g_cx(a, b));
}

void lower_ccrzk(uint32_t k, uint32_t c0, uint32_t c1, uint32_t t, bool inv,
                 std::vector<Gate>& out) {
    // Controlled-V chain with V = RZk(k+1), V*V = RZk(k).
    if (!inv) {
        lower_crzk(k + 1, c1, t, false, out);
        out.push_back(g_cx(c0, c1));
        lower_crzk(k + 1, c1, t, true, out);
        out.push_back(g_cx(c0, c1));
        lower_crzk(k + 1, c0, t, false, out);
    } else {
        lower_crzk(k + 1, c0, t, true, out);
        out.push_back(g_cx(c0, c1));
        lower_crzk(k + 1, c1, t, false, out);
        out.push_back(g_cx(c0, c1));
        lower_crzk(k + 1, c1, t, true, out);
    }
}

}  // namespace

Circuit lower(const Circuit& c, GateLevel level) {
    if (level == GateLevel::Macro) {
        Circuit out = c;
        out.level = GateLevel::Macro;
        return out;
    }
    Circuit out;
    out.num_qubits = c.num_qubits;
    out.level = GateLevel::Base;
    out.gates.reserve(c.gates.size() * 4);
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::ID:
            case GateKind::X:
            case GateKind::H:
            case GateKind::CX:
            case GateKind::RZk:
            case GateKind::RZkInv:
                out.gates.push_back(g);
                break;
            case GateKind::CCX:
                lower_ccx(g.w0, g.w1, g.w2, out.gates);
                break;
            case GateKind::CRZk:
                lower_crzk(g.k, g.w0, g.w1, false, out.gates);
                break;
            case GateKind::CRZkInv:
                lower_crzk(g.k, g.w0, g.w1, true, out.gates);
                break;
            case GateKind::CCRZk:
                lower_ccrzk(g.k, g.w0, g.w1, g.w2, false, out.gates);
                break;
            case GateKind::CCRZkInv:
                lower_ccrzk(g.k, g.w0, g.w1, g.w2, true, out.gates);
                break;
        }
    }
    return out;
}

}  // namespace oq
