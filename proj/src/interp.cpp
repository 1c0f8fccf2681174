#include "oq/interp.hpp"

#include <algorithm>

namespace oq {

namespace {

struct Runner {
    const Registers& regs;
    OqasmState& st;

    void check_var(Var v) const {
        if (v >= regs.count()) throw sim_fault("instruction names an unknown register");
    }

    QubitValue& at(Var v, uint32_t off) {
        check_var(v);
        if (off >= regs.size_of(v))
            throw sim_fault("offset out of range on register " + regs.name_of(v));
        return st.qubits[st.start[v] + off];
    }

    void apply_x(const Position& p) {
        QubitValue& q = at(p.var, p.offset);
        if (q.basis != BasisKind::Nor)
            throw sim_fault("X on a Fourier-basis qubit of " + regs.name_of(p.var));
        q.bit ^= 1;
    }

    void apply_sr(uint32_t m, Var x, bool inverse) {
        check_var(x);
        uint32_t sz = regs.size_of(x);
        uint32_t g = st.precision;
        uval mod_mask = st.mask();
        for (uint32_t i = 0; i < sz && i <= m; ++i) {
            QubitValue& q = st.qubits[st.start[x] + i];
            if (q.basis != BasisKind::Phi)
                throw sim_fault("phase cascade on a computational-basis qubit of " +
                                regs.name_of(x));
            uint32_t denom_log = m - i + 1;
            if (denom_log > g)
                throw sim_fault("phase cascade finer than the state precision");
            uval delta = pow2(g - denom_log);
            q.rot = inverse ? (q.rot - delta) & mod_mask : (q.rot + delta) & mod_mask;
        }
    }

    void apply_qft(uint32_t n, Var x) {
        check_var(x);
        uint32_t sz = regs.size_of(x);
        uint32_t g = st.precision;
        if (n == 0 || n > sz) throw sim_fault("transform precision out of range");
        if (n > g) throw sim_fault("transform precision exceeds state precision");
        uval y = 0;
        for (uint32_t k = 0; k < sz; ++k) {
            const QubitValue& q = st.qubits[st.start[x] + k];
            if (q.basis != BasisKind::Nor)
                throw sim_fault("transform applied to a Fourier-basis register " +
                                regs.name_of(x));
            if (k < n) y |= (q.bit & 1) << (n - 1 - k);
        }
        for (uint32_t k = 0; k < sz; ++k) {
            QubitValue& q = st.qubits[st.start[x] + k];
            if (k < n) {
                uint32_t w = n - k;  // rotation = frac(y / 2^w)
                q.rot = (y & mask_bits(w)) << (g - w);
            } else {
                // Hadamard image of the leftover bit.
                q.rot = (q.bit & 1) ? pow2(g - 1) : 0;
            }
            q.basis = BasisKind::Phi;
            q.bit = 0;
        }
    }

    void apply_qfti(uint32_t n, Var x) {
        check_var(x);
        uint32_t sz = regs.size_of(x);
        uint32_t g = st.precision;
        if (n == 0 || n > sz) throw sim_fault("transform precision out of range");
        if (n > g) throw sim_fault("transform precision exceeds state precision");
        const uval half = pow2(g - 1);
        for (uint32_t k = 0; k < sz; ++k) {
            const QubitValue& q = st.qubits[st.start[x] + k];
            if (q.basis != BasisKind::Phi)
                throw sim_fault("inverse transform applied to a computational-basis "
                                "register " + regs.name_of(x));
            if (k >= n && q.rot != 0 && q.rot != half)
                throw sim_fault("inverse transform: offset " + std::to_string(k) +
                                " of " + regs.name_of(x) +
                                " does not hold a Hadamard-image rotation");
        }
        const QubitValue& q0 = st.qubits[st.start[x]];
        if ((q0.rot & mask_bits(g - n)) != 0)
            throw sim_fault("inverse transform: register " + regs.name_of(x) +
                            " does not hold an integral " + std::to_string(n) +
                            "-bit Fourier value");
        uval y = q0.rot >> (g - n);
        for (uint32_t k = 1; k < n; ++k) {
            uint32_t w = n - k;
            uval expect = (y & mask_bits(w)) << (g - w);
            if (st.qubits[st.start[x] + k].rot != expect)
                throw sim_fault("inverse transform: inconsistent rotation at offset " +
                                std::to_string(k) + " of " + regs.name_of(x));
        }
        for (uint32_t k = 0; k < sz; ++k) {
            QubitValue& q = st.qubits[st.start[x] + k];
            q.bit = k < n ? (y >> (n - 1 - k)) & 1 : (q.rot != 0 ? 1 : 0);
            q.basis = BasisKind::Nor;
            q.rot = 0;
        }
    }

    void apply_shift(Op op, Var x) {
        check_var(x);
        auto first = st.qubits.begin() + st.start[x];
        auto last = first + regs.size_of(x);
        switch (op) {
            case Op::Lshift:
                // New offset k reads old offset k+1 (cyclic).
                std::rotate(first, first + 1, last);
                break;
            case Op::Rshift:
                std::rotate(first, last - 1, last);
                break;
            case Op::Rev:
                std::reverse(first, last);
                break;
            default:
                break;
        }
    }

    void run(const Instr* top) {
        std::vector<const Instr*> stack{top};
        while (!stack.empty()) {
            const Instr* i = stack.back();
            stack.pop_back();
            switch (i->op) {
                case Op::Seq:
                    stack.push_back(i->right.get());
                    stack.push_back(i->left.get());
                    break;
                case Op::Skip:
                    at(i->pos.var, i->pos.offset);  // position must exist
                    break;
                case Op::X:
                    apply_x(i->pos);
                    break;
                case Op::SR:
                    apply_sr(i->num, i->var, false);
                    break;
                case Op::SRI:
                    apply_sr(i->num, i->var, true);
                    break;
                case Op::QFT:
                    apply_qft(i->num, i->var);
                    break;
                case Op::QFTI:
                    apply_qfti(i->num, i->var);
                    break;
                case Op::Lshift:
                case Op::Rshift:
                case Op::Rev:
                    apply_shift(i->op, i->var);
                    break;
                case Op::CU: {
                    const QubitValue& c = at(i->pos.var, i->pos.offset);
                    if (c.basis != BasisKind::Nor)
                        throw sim_fault("control qubit of " + regs.name_of(i->pos.var) +
                                        " is not in the computational basis");
                    if (c.bit & 1) stack.push_back(i->left.get());
                    break;
                }
            }
        }
    }
};

}  // namespace

OqasmState interpret(const Registers& regs, const InstrPtr& prog, OqasmState st) {
    if (!prog) throw std::invalid_argument("interpret: null program");
    if (st.start.size() != regs.count() || st.qubits.size() != regs.total_qubits())
        throw sim_fault("state layout does not match the register table");
    Runner r{regs, st};
    r.run(prog.get());
    return st;
}

}  // namespace oq
