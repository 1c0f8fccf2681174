#include "oq/circuit.hpp"

namespace oq {

const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::ID: return "ID";
        case GateKind::X: return "X";
        case GateKind::H: return "H";
        case GateKind::CX: return "CX";
        case GateKind::CCX: return "CCX";
        case GateKind::RZk: return "RZk";
        case GateKind::RZkInv: return "RZkInv";
        case GateKind::CRZk: return "CRZk";
        case GateKind::CRZkInv: return "CRZkInv";
        case GateKind::CCRZk: return "CCRZk";
        case GateKind::CCRZkInv: return "CCRZkInv";
    }
    return "?";
}

uint32_t Gate::arity() const {
    switch (kind) {
        case GateKind::ID:
        case GateKind::X:
        case GateKind::H:
        case GateKind::RZk:
        case GateKind::RZkInv:
            return 1;
        case GateKind::CX:
        case GateKind::CRZk:
        case GateKind::CRZkInv:
            return 2;
        case GateKind::CCX:
        case GateKind::CCRZk:
        case GateKind::CCRZkInv:
            return 3;
    }
    return 0;
}

uint32_t Gate::target() const {
    switch (arity()) {
        case 1: return w0;
        case 2: return w1;
        default: return w2;
    }
}

Gate g_id(uint32_t t) { return {GateKind::ID, 0, t, 0, 0}; }
Gate g_x(uint32_t t) { return {GateKind::X, 0, t, 0, 0}; }
Gate g_h(uint32_t t) { return {GateKind::H, 0, t, 0, 0}; }
Gate g_cx(uint32_t c, uint32_t t) { return {GateKind::CX, 0, c, t, 0}; }
Gate g_ccx(uint32_t c0, uint32_t c1, uint32_t t) { return {GateKind::CCX, 0, c0, c1, t}; }
Gate g_rzk(uint32_t k, uint32_t t) { return {GateKind::RZk, k, t, 0, 0}; }
Gate g_rzki(uint32_t k, uint32_t t) { return {GateKind::RZkInv, k, t, 0, 0}; }
Gate g_crzk(uint32_t k, uint32_t c, uint32_t t) { return {GateKind::CRZk, k, c, t, 0}; }
Gate g_crzki(uint32_t k, uint32_t c, uint32_t t) { return {GateKind::CRZkInv, k, c, t, 0}; }
Gate g_ccrzk(uint32_t k, uint32_t c0, uint32_t c1, uint32_t t) {
    return {GateKind::CCRZk, k, c0, c1, t};
}
Gate g_ccrzki(uint32_t k, uint32_t c0, uint32_t c1, uint32_t t) {
    return {GateKind::CCRZkInv, k, c0, c1, t};
}

Circuit ctrl(uint32_t control, const Circuit& body) {
    Circuit out;
    out.num_qubits = body.num_qubits;
    out.level = body.level;
    out.gates.reserve(body.gates.size());
    for (const Gate& g : body.gates) {
        if (g.arity() >= 1 && (g.w0 == control || (g.arity() >= 2 && g.w1 == control) ||
                               (g.arity() >= 3 && g.w2 == control)))
            throw translate_error("control wire collides with the controlled gate");
        switch (g.kind) {
            case GateKind::ID:
                break;  // controlled identity is the identity
            case GateKind::X:
                out.gates.push_back(g_cx(control, g.w0));
                break;
            case GateKind::CX:
                out.gates.push_back(g_ccx(control, g.w0, g.w1));
                break;
            case GateKind::RZk:
                out.gates.push_back(g_crzk(g.k, control, g.w0));
                break;
            case GateKind::RZkInv:
                out.gates.push_back(g_crzki(g.k, control, g.w0));
                break;
            case GateKind::CRZk:
                out.gates.push_back(g_ccrzk(g.k, control, g.w0, g.w1));
                break;
            case GateKind::CRZkInv:
                out.gates.push_back(g_ccrzki(g.k, control, g.w0, g.w1));
                break;
            case GateKind::CCX:
            case GateKind::CCRZk:
            case GateKind::CCRZkInv:
                throw translate_error("adding a control would exceed two controls on " +
                                      std::string(gate_name(g.kind)));
            case GateKind::H:
                throw translate_error("controlled Hadamard is outside the gate set");
        }
    }
    return out;
}

Resources count_resources(const Circuit& c) {
    Resources r;
    r.qubits = c.num_qubits;
    for (const Gate& g : c.gates) {
        if (g.kind == GateKind::ID) {
            ++r.id_count;
            continue;
        }
        ++r.total;
        ++r.histogram[gate_name(g.kind)];
    }
    return r;
}

}  // namespace oq
