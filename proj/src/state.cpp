#include "oq/state.hpp"

namespace oq {

uint32_t natural_precision(const Registers& regs) {
    uint32_t g = 1;
    for (Var v = 0; v < regs.count(); ++v)
        if (regs.size_of(v) > g) g = regs.size_of(v);
    if (g > max_precision)
        throw sim_fault("register size " + std::to_string(g) +
                        " exceeds supported precision " + std::to_string(max_precision));
    return g;
}

OqasmState encode_inputs(const Registers& regs, const std::map<Var, uval>& values) {
    OqasmState st;
    st.precision = natural_precision(regs);
    st.start.resize(regs.count());
    uint32_t off = 0;
    for (Var v = 0; v < regs.count(); ++v) {
        st.start[v] = off;
        off += regs.size_of(v);
    }
    st.qubits.assign(off, QubitValue{});
    for (const auto& [v, value] : values) {
        if (v >= regs.count()) throw sim_fault("encode_inputs: unknown register");
        uint32_t n = regs.size_of(v);
        if (n < 128 && value >= pow2(n))
            throw sim_fault("encode_inputs: value does not fit register " +
                            regs.name_of(v));
        for (uint32_t k = 0; k < n; ++k)
            st.qubits[st.start[v] + k].bit = (value >> k) & 1;
    }
    return st;
}

uval decode_nor(const Registers& regs, const OqasmState& st, Var v) {
    if (v >= regs.count()) throw sim_fault("decode_nor: unknown register");
    uval out = 0;
    uint32_t n = regs.size_of(v);
    for (uint32_t k = 0; k < n; ++k) {
        const QubitValue& q = st.qubits[st.start[v] + k];
        if (q.basis != BasisKind::Nor)
            throw sim_fault("decode_nor: register " + regs.name_of(v) +
                            " has a Fourier-basis qubit at offset " + std::to_string(k));
        out |= (q.bit & 1) << k;
    }
    return out;
}

bool well_formed_state(const Registers& regs, const TypeEnv& env, const OqasmState& st) {
    if (env.size() != regs.count() || st.start.size() != regs.count()) return false;
    if (st.qubits.size() != regs.total_qubits()) return false;
    if (st.precision == 0 || st.precision > max_precision) return false;
    const uval half = pow2(st.precision - 1);
    for (Var v = 0; v < regs.count(); ++v) {
        uint32_t sz = regs.size_of(v);
        if (env[v].kind == BasisKind::Nor) {
            for (uint32_t k = 0; k < sz; ++k) {
                const QubitValue& q = st.qubits[st.start[v] + k];
                if (q.basis != BasisKind::Nor || q.bit > 1) return false;
            }
            continue;
        }
        uint32_t n = env[v].precision;
        if (n == 0 || n > sz || n > st.precision) return false;
        for (uint32_t k = 0; k < sz; ++k) {
            const QubitValue& q = st.qubits[st.start[v] + k];
            if (q.basis != BasisKind::Phi) return false;
            if (k >= n && q.rot != 0 && q.rot != half) return false;
        }
        // Offset 0 determines the stored value y; every other offset below the
        // precision must carry the matching rotation frac(y / 2^(n-k)).
        const QubitValue& q0 = st.qubits[st.start[v]];
        if ((q0.rot & mask_bits(st.precision - n)) != 0) return false;
        uval y = q0.rot >> (st.precision - n);
        for (uint32_t k = 1; k < n; ++k) {
            uint32_t w = n - k;
            uval expect = (y & mask_bits(w)) << (st.precision - w);
            if (st.qubits[st.start[v] + k].rot != expect) return false;
        }
    }
    return true;
}

}  // namespace oq
