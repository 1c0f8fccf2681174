#include "oq/dense.hpp"

#include <cmath>

namespace oq {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// exp(2*pi*i * k / 2^g) computed from the exact dyadic numerator.
amp dyadic_phase(uval num, uint32_t g) {
    long double frac = static_cast<long double>(num) / std::ldexp(1.0L, static_cast<int>(g));
    double theta = static_cast<double>(two_pi * frac);
    return {std::cos(theta), std::sin(theta)};
}

amp rot_phase(uint32_t k, bool inverse) {
    double theta = two_pi * std::ldexp(1.0, -static_cast<int>(k));
    if (inverse) theta = -theta;
    return {std::cos(theta), std::sin(theta)};
}

void phase_where(cvec& v, uint64_t mask, amp ph) {
    for (uint64_t i = 0; i < v.size(); ++i)
        if ((i & mask) == mask) v[i] *= ph;
}

}  // namespace

cvec dense_sim(const Circuit& c, cvec v) {
    if (c.num_qubits > dense_qubit_cap)
        throw std::invalid_argument("dense_sim: circuit exceeds the qubit cap");
    const uint64_t dim = 1ull << c.num_qubits;
    if (v.size() != dim)
        throw std::invalid_argument("dense_sim: vector dimension mismatch");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::ID:
                break;
            case GateKind::X: {
                uint64_t bit = 1ull << g.w0;
                for (uint64_t i = 0; i < dim; ++i)
                    if (i & bit) std::swap(v[i], v[i ^ bit]);
                break;
            }
            case GateKind::CX: {
                uint64_t cbit = 1ull << g.w0, tbit = 1ull << g.w1;
                for (uint64_t i = 0; i < dim; ++i)
                    if ((i & cbit) && (i & tbit)) std::swap(v[i], v[i ^ tbit]);
                break;
            }
            case GateKind::CCX: {
                uint64_t c0 = 1ull << g.w0, c1 = 1ull << g.w1, tbit = 1ull << g.w2;
                for (uint64_t i = 0; i < dim; ++i)
                    if ((i & c0) && (i & c1) && (i & tbit)) std::swap(v[i], v[i ^ tbit]);
                break;
            }
            case GateKind::H: {
                uint64_t bit = 1ull << g.w0;
                for (uint64_t i = 0; i < dim; ++i) {
                    if (i & bit) continue;
                    amp a = v[i], b = v[i | bit];
                    v[i] = (a + b) * inv_sqrt2;
                    v[i | bit] = (a - b) * inv_sqrt2;
                }
                break;
            }
            case GateKind::RZk:
            case GateKind::RZkInv:
                phase_where(v, 1ull << g.w0, rot_phase(g.k, g.kind == GateKind::RZkInv));
                break;
            case GateKind::CRZk:
            case GateKind::CRZkInv:
                phase_where(v, (1ull << g.w0) | (1ull << g.w1),
                            rot_phase(g.k, g.kind == GateKind::CRZkInv));
                break;
            case GateKind::CCRZk:
            case GateKind::CCRZkInv:
                phase_where(v, (1ull << g.w0) | (1ull << g.w1) | (1ull << g.w2),
                            rot_phase(g.k, g.kind == GateKind::CCRZkInv));
                break;
        }
    }
    return v;
}

cvec embed_state(const Registers& regs, const OqasmState& st, const QubitMap& map,
                 uint32_t num_qubits) {
    if (num_qubits > dense_qubit_cap)
        throw std::invalid_argument("embed_state: exceeds the qubit cap");
    if (map.wire.size() != regs.count())
        throw std::invalid_argument("embed_state: wire map mismatch");
    const uint64_t dim = 1ull << num_qubits;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    cvec v(dim, amp{1.0, 0.0});
    // Multiply per-qubit factors into every index.
    for (Var r = 0; r < regs.count(); ++r) {
        for (uint32_t k = 0; k < regs.size_of(r); ++k) {
            const QubitValue& q = st.qubits[st.start[r] + k];
            uint64_t bit = 1ull << map.wire[r][k];
            amp ph = dyadic_phase(q.phase_num, st.precision);
            if (q.basis == BasisKind::Nor) {
                for (uint64_t i = 0; i < dim; ++i) {
                    bool one = (i & bit) != 0;
                    v[i] *= (one == (q.bit != 0)) ? ph : amp{0.0, 0.0};
                }
            } else {
                amp on = dyadic_phase(q.rot, st.precision);
                for (uint64_t i = 0; i < dim; ++i)
                    v[i] *= ph * inv_sqrt2 * ((i & bit) ? on : amp{1.0, 0.0});
            }
        }
    }
    return v;
}

double vec_distance(const cvec& a, const cvec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vec_distance: dimension mismatch");
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace oq
