#include "oq/translate.hpp"

#include <algorithm>

namespace oq {

QubitMap identity_map(const Registers& regs) {
    QubitMap m;
    m.wire.resize(regs.count());
    uint32_t w = 0;
    for (Var v = 0; v < regs.count(); ++v) {
        m.wire[v].resize(regs.size_of(v));
        for (uint32_t k = 0; k < regs.size_of(v); ++k) m.wire[v][k] = w++;
    }
    return m;
}

namespace {

struct Translator {
    const Registers& regs;
    QubitMap map;
    std::vector<Gate> gates;

    void check_pos(const Position& p) const {
        if (p.var >= regs.count() || p.offset >= regs.size_of(p.var))
            throw translate_error("position out of range");
    }

    void emit(const InstrPtr& node) {
        const Instr* i = node.get();
        switch (i->op) {
            case Op::Seq:
                emit(i->left);
                emit(i->right);
                return;
            case Op::Skip:
                check_pos(i->pos);
                gates.push_back(g_id(map.at(i->pos)));
                return;
            case Op::X:
                check_pos(i->pos);
                gates.push_back(g_x(map.at(i->pos)));
                return;
            case Op::SR:
            case Op::SRI: {
                if (i->var >= regs.count()) throw translate_error("unknown register");
                uint32_t sz = regs.size_of(i->var);
                if (i->num >= sz)
                    throw translate_error("cascade index exceeds register size");
                for (uint32_t off = 0; off <= i->num; ++off) {
                    uint32_t k = i->num - off + 1;
                    uint32_t w = map.wire[i->var][off];
                    gates.push_back(i->op == Op::SR ? g_rzk(k, w) : g_rzki(k, w));
                }
                return;
            }
            case Op::QFT: {
                if (i->var >= regs.count()) throw translate_error("unknown register");
                uint32_t sz = regs.size_of(i->var);
                uint32_t n = i->num;
                if (n == 0 || n > sz) throw translate_error("precision out of range");
                const auto& w = map.wire[i->var];
                for (uint32_t j = 0; j < n; ++j) {
                    gates.push_back(g_h(w[j]));
                    for (uint32_t src = j + 1; src < n; ++src)
                        gates.push_back(g_crzk(src - j + 1, w[src], w[j]));
                }
                for (uint32_t j = n; j < sz; ++j) gates.push_back(g_h(w[j]));
                return;
            }
            case Op::QFTI: {
                if (i->var >= regs.count()) throw translate_error("unknown register");
                uint32_t sz = regs.size_of(i->var);
                uint32_t n = i->num;
                if (n == 0 || n > sz) throw translate_error("precision out of range");
                const auto& w = map.wire[i->var];
                for (uint32_t j = sz; j-- > n;) gates.push_back(g_h(w[j]));
                for (uint32_t j = n; j-- > 0;) {
                    for (uint32_t src = n; src-- > j + 1;)
                        gates.push_back(g_crzki(src - j + 1, w[src], w[j]));
                    gates.push_back(g_h(w[j]));
                }
                return;
            }
            case Op::Lshift: {
                auto& w = wire_row(i->var);
                std::rotate(w.begin(), w.begin() + 1, w.end());
                gates.push_back(g_id(w[0]));
                return;
            }
            case Op::Rshift: {
                auto& w = wire_row(i->var);
                std::rotate(w.begin(), w.end() - 1, w.end());
                gates.push_back(g_id(w[0]));
                return;
            }
            case Op::Rev: {
                auto& w = wire_row(i->var);
                std::reverse(w.begin(), w.end());
                gates.push_back(g_id(w[0]));
                return;
            }
            case Op::CU: {
                check_pos(i->pos);
                uint32_t c = map.at(i->pos);
                Translator sub{regs, map, {}};
                sub.emit(i->left);
                if (!(sub.map == map))
                    throw translate_error(
                        "controlled body must not apply a net position permutation");
                Circuit body;
                body.num_qubits = 0;
                body.gates = std::move(sub.gates);
                Circuit controlled = ctrl(c, body);
                gates.insert(gates.end(), controlled.gates.begin(),
                             controlled.gates.end());
                return;
            }
        }
        throw translate_error("unhandled instruction");
    }

    std::vector<uint32_t>& wire_row(Var v) {
        if (v >= regs.count()) throw translate_error("unknown register");
        return map.wire[v];
    }
};

}  // namespace

TranslateResult translate(const Registers& regs, const QubitMap& initial,
                          const InstrPtr& prog) {
    if (!prog) throw std::invalid_argument("translate: null program");
    if (initial.wire.size() != regs.count())
        throw translate_error("wire map does not match the register table");
    Translator t{regs, initial, {}};
    t.emit(prog);
    TranslateResult out;
    out.map = std::move(t.map);
    out.circ.num_qubits = regs.total_qubits();
    out.circ.level = GateLevel::Macro;
    out.circ.gates = std::move(t.gates);
    return out;
}

TranslateResult translate(const Registers& regs, const InstrPtr& prog) {
    return translate(regs, identity_map(regs), prog);
}

}  // namespace oq
