#include "oq/qimp_interp.hpp"

namespace oq::qimp {
namespace {

struct InterpSink : Sink {
    uint32_t sz;
    const std::map<std::string, std::vector<uval>>& inputs;
    std::map<Slot, uval> val;
    std::vector<bool> branch;  // frozen truth of each enclosing Q guard
    std::vector<std::map<Slot, uval>> snaps;

    // Undo record per entry id, used when the entry is inverted.  Operand
    // values are captured at event time; the walker's history rules ensure
    // they are still current when the inversion runs.
    struct Undo {
        bool in_place = false;
        Bop op = Bop::Add;
        uval operand = 0;
    };
    std::map<uint64_t, Undo> undo;

    InterpSink(uint32_t s, const std::map<std::string, std::vector<uval>>& in)
        : sz(s), inputs(in) {}

    bool live() const {
        for (bool b : branch)
            if (!b) return false;
        return true;
    }
    uval get(const QAtom& a) const { return a.is_const ? a.value : val.at(a.slot); }

    void on_input(Slot s, const std::string& name, uint32_t elem, Base,
                  uint32_t width) override {
        uval v = 0;
        auto it = inputs.find(name);
        if (it != inputs.end() && elem < it->second.size())
            v = it->second[elem] & word_mask(width);
        val[s] = v;
    }
    void on_zero(Slot s, Base, uint32_t) override { val[s] = 0; }

    void on_load(uint64_t id, Slot dst, Base, uint32_t width, const QAtom& src)
        override {
        val[dst] = live() ? (get(src) & word_mask(width)) : 0;
        undo[id] = {false, Bop::Add, 0};
    }

    void on_bin(uint64_t id, Slot dst, Base, uint32_t width, Bop op,
                const QAtom& a, const QAtom& b) override {
        if (live()) {
            // The word op runs at the operands' base: comparisons narrow the
            // destination to Bool, which must not narrow the operands.
            Base ob = (a.base == Base::Fixedp || b.base == Base::Fixedp)
                          ? Base::Fixedp
                          : a.base;
            auto r = apply_bop(op, ob, get(a), get(b), sz);
            // The walker rejects zero divisors before the event fires.
            val[dst] = *r & word_mask(width);
        } else {
            val[dst] = 0;
        }
        undo[id] = {false, Bop::Add, 0};
    }

    void on_op_assign(uint64_t id, Slot dst, Base base, uint32_t width, Bop op,
                      const QAtom& v) override {
        uval rv = get(v);
        if (live())
            val[dst] = *apply_bop(op, base, val.at(dst), rv, sz) &
                       word_mask(width);
        undo[id] = {true, op, rv};
    }

    static Bop inverse_of(Bop op) {
        switch (op) {
            case Bop::Add: return Bop::Sub;
            case Bop::Sub: return Bop::Add;
            case Bop::RotL: return Bop::RotR;
            case Bop::RotR: return Bop::RotL;
            default: return op;  // Xor is its own inverse
        }
    }

    void on_inv(uint64_t id, Slot slot, bool in_place) override {
        const Undo& u = undo.at(id);
        if (in_place) {
            if (live())
                val[slot] = *apply_bop(inverse_of(u.op), Base::Nat, val.at(slot),
                                       u.operand, sz);
        } else {
            val.erase(slot);  // uncomputed back to zero and released
        }
    }

    void on_if_begin(Slot g) override { branch.push_back(val.at(g) != 0); }
    void on_if_else() override { branch.back() = !branch.back(); }
    void on_if_end() override { branch.pop_back(); }

    void on_call_begin() override { snaps.push_back(val); }
    void on_call_end(uint64_t id, Slot dst, Base, uint32_t width,
                     const QAtom& ret) override {
        uval rv = get(ret);
        val = std::move(snaps.back());
        snaps.pop_back();
        val[dst] = live() ? (rv & word_mask(width)) : 0;
        undo[id] = {false, Bop::Add, 0};
    }
};

}  // namespace

RunResult interpret(const CheckedProgram& p, uint32_t sz,
                    const std::map<std::string, std::vector<uval>>& q_inputs,
                    const std::map<std::string, uval>& c_overrides) {
    if (sz < 2 || sz > 63)
        throw qimp_error("size", "bit width must be between 2 and 63", 0);
    for (auto& [name, vals] : q_inputs) {
        auto it = p.global_types.find(name);
        if (it == p.global_types.end() || it->second.mode != Mode::Q)
            throw qimp_error("input", name + " is not a quantum global", 0);
        uint32_t len = it->second.array_len ? it->second.array_len : 1;
        if (vals.size() != len)
            throw qimp_error("input",
                             name + " expects " + std::to_string(len) +
                                 " element(s), got " +
                                 std::to_string(vals.size()),
                             0);
    }
    InterpSink sink(sz, q_inputs);
    WalkResult w = walk_program(p, sz, c_overrides, sink);
    RunResult out;
    if (w.error) {
        out.error = w.error;
        return out;
    }
    for (auto& [name, slots] : w.q_final) {
        std::vector<uval>& vals = out.q[name];
        for (Slot s : slots) vals.push_back(sink.val.at(s));
    }
    out.c = w.c_final;
    return out;
}

}  // namespace oq::qimp
