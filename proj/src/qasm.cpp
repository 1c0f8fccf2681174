#include "oq/qasm.hpp"

#include <set>
#include <sstream>

#include "oq/common.hpp"

namespace oq {

namespace {

// Exact angle text for 2*pi / 2^k, optionally negated: pi, pi/2, pi/4, ...
std::string angle(uint32_t k, bool negative) {
    std::string s = negative ? "-pi" : "pi";
    if (k > 1) s += "/" + to_string(pow2(k - 1));
    return s;
}

}  // namespace

std::string emit_qasm(const Circuit& c) {
    std::ostringstream os;
    os << "OPENQASM 2.0;\n";
    os << "include \"qelib1.inc\";\n";

    // Doubly-controlled rotations need local gate definitions.
    std::set<std::pair<uint32_t, bool>> ccrz;  // (k, inverted)
    for (const Gate& g : c.gates) {
        if (g.kind == GateKind::CCRZk) ccrz.insert({g.k, false});
        if (g.kind == GateKind::CCRZkInv) ccrz.insert({g.k, true});
    }
    for (const auto& [k, inv] : ccrz) {
        // Controlled-square-root chain: cu1 carries half the angle.
        std::string nm = (inv ? "ccrzki" : "ccrzk") + std::to_string(k);
        os << "gate " << nm << " a,b,c {";
        os << " cu1(" << angle(k + 1, inv) << ") b,c;";
        os << " cx a,b;";
        os << " cu1(" << angle(k + 1, !inv) << ") b,c;";
        os << " cx a,b;";
        os << " cu1(" << angle(k + 1, inv) << ") a,c;";
        os << " }\n";
    }

    // A zero-qubit circuit is the headers alone: qreg q[0] is not legal.
    if (c.num_qubits > 0) os << "qreg q[" << c.num_qubits << "];\n";
    auto w = [&](uint32_t i) { return "q[" + std::to_string(i) + "]"; };
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::ID:
                os << "id " << w(g.w0) << ";\n";
                break;
            case GateKind::X:
                os << "x " << w(g.w0) << ";\n";
                break;
            case GateKind::H:
                os << "h " << w(g.w0) << ";\n";
                break;
            case GateKind::CX:
                os << "cx " << w(g.w0) << "," << w(g.w1) << ";\n";
                break;
            case GateKind::CCX:
                os << "ccx " << w(g.w0) << "," << w(g.w1) << "," << w(g.w2) << ";\n";
                break;
            case GateKind::RZk:
                os << "u1(" << angle(g.k, false) << ") " << w(g.w0) << ";\n";
                break;
            case GateKind::RZkInv:
                os << "u1(" << angle(g.k, true) << ") " << w(g.w0) << ";\n";
                break;
            case GateKind::CRZk:
                os << "cu1(" << angle(g.k, false) << ") " << w(g.w0) << "," << w(g.w1)
                   << ";\n";
                break;
            case GateKind::CRZkInv:
                os << "cu1(" << angle(g.k, true) << ") " << w(g.w0) << "," << w(g.w1)
                   << ";\n";
                break;
            case GateKind::CCRZk:
                os << "ccrzk" << g.k << " " << w(g.w0) << "," << w(g.w1) << ","
                   << w(g.w2) << ";\n";
                break;
            case GateKind::CCRZkInv:
                os << "ccrzki" << g.k << " " << w(g.w0) << "," << w(g.w1) << ","
                   << w(g.w2) << ";\n";
                break;
        }
    }
    return os.str();
}

}  // namespace oq
