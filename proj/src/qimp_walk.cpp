#include "oq/qimp_walk.hpp"

#include <cassert>
#include <memory>

namespace oq::qimp {
namespace {

struct ClassicalError {
    std::string msg;
};

struct Entry {
    uint64_t id = 0;
    Slot slot = 0;
    bool in_place = false;
    uint32_t token = 0;  // guard occurrence at push time
    std::vector<std::pair<Slot, uint32_t>> operands;  // (slot, version at read)
};

struct Inst {
    Type type;
    uint32_t len = 1;
    std::vector<uval> cvals;               // C-mode values
    std::vector<std::vector<Entry>> hist;  // Q-mode history per element
    std::vector<Slot> base;                // Q-mode base slot (0 = not minted)
    std::vector<uint64_t> pushes;          // total pushes ever, per element
};

using InstPtr = std::shared_ptr<Inst>;

struct Walker {
    const CheckedProgram& P;
    uint32_t sz;
    Sink& sink;

    std::vector<std::map<std::string, InstPtr>> scopes;
    std::map<Slot, uint32_t> version;
    Slot next_slot = 1;
    uint64_t next_entry = 1;
    uint32_t next_token = 1;
    std::vector<uint32_t> tokens;

    struct CWrite {
        InstPtr inst;
        uint32_t elem;
        uval old;
    };
    struct CallFrame {
        std::vector<std::pair<InstPtr, uint32_t>> pushes;
        std::vector<CWrite> c_writes;
    };
    std::vector<CallFrame> calls;

    Walker(const CheckedProgram& p, uint32_t s, Sink& k) : P(p), sz(s), sink(k) {}

    uint32_t cur_token() const { return tokens.empty() ? 0 : tokens.back(); }
    uint32_t width_of(Base b) const { return b == Base::Bool ? 1 : sz; }
    [[noreturn]] void fail(const std::string& m) const { throw ClassicalError{m}; }

    const InstPtr& find(const std::string& name) {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        throw qimp_error("unbound", "unknown variable " + name, 0);
    }

    const FunDef& fun_def(const std::string& name) const {
        for (auto& f : P.prog.funs)
            if (f.name == name) return f;
        throw qimp_error("call", "unknown function " + name, 0);
    }

    static bool is_user_call(const ExprPtr& e) {
        return e && e->kind == Ex::Call && !builtin_sigs().count(e->callee);
    }

    bool expr_is_q(const ExprPtr& e) {
        if (!e) return false;
        if (e->kind == Ex::Load) return find(e->lv.var)->type.mode == Mode::Q;
        if (e->kind == Ex::Bin) return expr_is_q(e->a) || expr_is_q(e->b);
        return false;
    }

    // ---- classical evaluation ----

    struct CV {
        uval v;
        Base base;
    };

    CV eval(const ExprPtr& e) {
        switch (e->kind) {
            case Ex::Num: return {e->num & word_mask(sz), Base::Nat};
            case Ex::Fix:
                return {scale_fixed_literal(e->text, sz, e->line), Base::Fixedp};
            case Ex::BoolLit: return {e->num & 1, Base::Bool};
            case Ex::Load: {
                auto [inst, elem] = resolve(e->lv, e->line);
                return {inst->cvals[elem], inst->type.base};
            }
            case Ex::Bin: {
                CV a = eval(e->a);
                CV b = eval(e->b);
                auto r = apply_bop(e->op, a.base, a.v, b.v, sz);
                if (!r) fail("division by zero");
                bool cmp = e->op == Bop::Lt || e->op == Bop::Le ||
                           e->op == Bop::Gt || e->op == Bop::Ge ||
                           e->op == Bop::Eq || e->op == Bop::Ne;
                return {*r, cmp ? Base::Bool : a.base};
            }
            case Ex::Call: {
                std::vector<uval> args;
                args.reserve(e->args.size());
                for (auto& x : e->args) args.push_back(eval(x).v);
                auto r = eval_builtin(e->callee, args, sz);
                if (!r) fail("domain error in " + e->callee);
                return {*r, builtin_sigs().at(e->callee).result};
            }
        }
        fail("malformed expression");
    }

    std::pair<Inst*, uint32_t> resolve(const Lval& lv, int line) {
        const InstPtr& i = find(lv.var);
        uint32_t elem = 0;
        if (i->type.array_len) {
            uval idx = eval(lv.index).v;
            if (idx >= i->type.array_len)
                fail("index out of bounds on " + lv.var + " (line " +
                     std::to_string(line) + ")");
            elem = uint32_t(lo64(idx));
        }
        return {i.get(), elem};
    }

    // ---- slots and history ----

    Slot mint() {
        Slot s = next_slot++;
        version[s] = 0;
        return s;
    }
    void bump(Slot s) { ++version[s]; }

    // Current top slot; lazily materializes a zeroed register for Q state
    // read before ever being assigned.
    Slot top_slot(Inst* inst, uint32_t elem) {
        auto& h = inst->hist[elem];
        if (!h.empty()) return h.back().slot;
        if (inst->base[elem] == 0) {
            inst->base[elem] = mint();
            sink.on_zero(inst->base[elem], inst->type.base,
                         width_of(inst->type.base));
        }
        return inst->base[elem];
    }
    Slot try_top(Inst* inst, uint32_t elem) const {
        auto& h = inst->hist[elem];
        return h.empty() ? inst->base[elem] : h.back().slot;
    }

    QAtom atom_of(const ExprPtr& e) {
        if (e->kind == Ex::Load) {
            auto [inst, elem] = resolve(e->lv, e->line);
            if (inst->type.mode == Mode::Q) {
                QAtom q;
                q.is_const = false;
                q.slot = top_slot(inst, elem);
                q.base = inst->type.base;
                return q;
            }
            return {true, inst->cvals[elem], 0, inst->type.base};
        }
        CV c = eval(e);
        return {true, c.v, 0, c.base};
    }

    std::vector<std::pair<Slot, uint32_t>> reads_of(
        std::initializer_list<const QAtom*> atoms) {
        std::vector<std::pair<Slot, uint32_t>> v;
        for (const QAtom* a : atoms)
            if (!a->is_const) v.emplace_back(a->slot, version[a->slot]);
        return v;
    }

    InstPtr owner_of(Inst* inst) {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
            for (auto& [n, p] : *it)
                if (p.get() == inst) return p;
        return nullptr;
    }

    void journal_push(Inst* inst, uint32_t elem) {
        if (calls.empty()) return;
        if (InstPtr p = owner_of(inst)) calls.back().pushes.emplace_back(p, elem);
    }

    void note_c_write(Inst* inst, uint32_t elem) {
        if (calls.empty()) return;
        if (InstPtr p = owner_of(inst))
            calls.back().c_writes.push_back({p, elem, inst->cvals[elem]});
    }

    void check_alias(Inst* dinst, uint32_t delem,
                     std::initializer_list<const QAtom*> atoms, int line) {
        Slot t = try_top(dinst, delem);
        if (t == 0) return;
        for (const QAtom* a : atoms)
            if (!a->is_const && a->slot == t)
                throw qimp_error(
                    "binop_q",
                    "destination may not appear among its own operands", line);
    }

    void push_entry(Inst* dinst, uint32_t delem, Entry en) {
        dinst->hist[delem].push_back(std::move(en));
        ++dinst->pushes[delem];
        journal_push(dinst, delem);
    }

    // Fresh-slot store of an elaborated rhs (atom / binop / user call).
    void q_store(Inst* dinst, uint32_t delem, const ExprPtr& rhs, int line) {
        Base b = dinst->type.base;
        uint32_t w = width_of(b);
        if (is_user_call(rhs)) {
            do_call(dinst, delem, rhs);
            return;
        }
        if (rhs->kind == Ex::Bin && expr_is_q(rhs)) {
            QAtom x = atom_of(rhs->a);
            QAtom y = atom_of(rhs->b);
            // Divisors are classical by typing, so a zero divisor is
            // detectable here on the path shared by both backends.
            if ((rhs->op == Bop::Div || rhs->op == Bop::Mod) && y.is_const &&
                y.value == 0)
                fail("division by zero");
            check_alias(dinst, delem, {&x, &y}, line);
            uint64_t id = next_entry++;
            Slot dst = mint();
            push_entry(dinst, delem,
                       Entry{id, dst, false, cur_token(), reads_of({&x, &y})});
            sink.on_bin(id, dst, b, w, rhs->op, x, y);
            return;
        }
        QAtom src = atom_of(rhs);
        check_alias(dinst, delem, {&src}, line);
        uint64_t id = next_entry++;
        Slot dst = mint();
        push_entry(dinst, delem,
                   Entry{id, dst, false, cur_token(), reads_of({&src})});
        sink.on_load(id, dst, b, w, src);
    }

    void q_op_assign(const StmtPtr& s) {
        auto [inst, elem] = resolve(s->lv, s->line);
        QAtom v = atom_of(s->rhs);
        Slot dst = top_slot(inst, elem);
        if (!v.is_const && v.slot == dst)
            throw qimp_error("binop_q",
                             "destination may not appear among its own operands",
                             s->line);
        uint64_t id = next_entry++;
        push_entry(inst, elem, Entry{id, dst, true, cur_token(), reads_of({&v})});
        sink.on_op_assign(id, dst, inst->type.base, width_of(inst->type.base),
                          s->op, v);
        bump(dst);
    }

    void q_inv(const StmtPtr& s) {
        auto [inst, elem] = resolve(s->lv, s->line);
        auto& h = inst->hist[elem];
        if (h.empty())
            throw qimp_error(
                inst->pushes[elem] ? "inv_count" : "inv_no_predecessor",
                "nothing to undo for " + s->lv.var, s->line);
        const Entry en = h.back();
        if (en.token != cur_token())
            throw qimp_error("inv_no_predecessor",
                             "the pending assignment of " + s->lv.var +
                                 " was made under a different branch",
                             s->line);
        for (auto& [os, ver] : en.operands)
            if (version.at(os) != ver)
                throw qimp_error(
                    "inv_operand_written",
                    "an operand of the assignment being undone for " + s->lv.var +
                        " has changed since",
                    s->line);
        h.pop_back();
        sink.on_inv(en.id, en.slot, en.in_place);
        bump(en.slot);
    }

    // ---- calls ----

    std::vector<uval> eval_args(const ExprPtr& e) {
        std::vector<uval> args;
        args.reserve(e->args.size());
        for (auto& a : e->args) args.push_back(eval(a).v);
        return args;
    }

    // Hides caller-local scopes and installs a parameter frame for the
    // callee body; restores everything on destruction.
    struct FrameGuard {
        Walker& w;
        std::vector<std::map<std::string, InstPtr>> saved;
        FrameGuard(Walker& wk, const FunDef& f, const std::vector<uval>& args)
            : w(wk) {
            saved.assign(std::make_move_iterator(w.scopes.begin() + 1),
                         std::make_move_iterator(w.scopes.end()));
            w.scopes.resize(1);
            w.scopes.emplace_back();
            for (size_t i = 0; i < f.params.size(); ++i) {
                auto inst = std::make_shared<Inst>();
                inst->type = f.params[i].first;
                inst->cvals.assign(1, args[i]);
                w.scopes.back()[f.params[i].second] = inst;
            }
        }
        ~FrameGuard() {
            w.scopes.resize(1);
            for (auto& s : saved) w.scopes.push_back(std::move(s));
        }
    };

    uval classical_call(const ExprPtr& e) {
        const FunDef& f = fun_def(e->callee);
        std::vector<uval> args = eval_args(e);
        // Callees communicate only through their return value: C-global
        // writes by the body are rolled back, mirroring the Q-call unwind.
        std::vector<std::vector<uval>> saved;
        for (auto& [n, inst] : scopes[0])
            if (inst->type.mode == Mode::C) saved.push_back(inst->cvals);
        std::optional<uval> ret;
        {
            FrameGuard frame(*this, f, args);
            for (auto& s : f.body) {
                if (s->kind == St::Ret) {
                    auto [inst, elem] = resolve(s->rhs->lv, s->line);
                    ret = inst->cvals[elem];
                    break;
                }
                walk_stmt(s);
            }
        }
        size_t i = 0;
        for (auto& [n, inst] : scopes[0])
            if (inst->type.mode == Mode::C) inst->cvals = saved[i++];
        if (!ret) throw qimp_error("call", e->callee + " did not return", 0);
        return *ret;
    }

    void do_call(Inst* dinst, uint32_t delem, const ExprPtr& e) {
        const FunInfo& fi = P.funs.at(e->callee);
        Base b = dinst->type.base;
        uint32_t w = width_of(b);
        if (fi.pure_c) {
            uval v = classical_call(e);
            uint64_t id = next_entry++;
            Slot dst = mint();
            push_entry(dinst, delem, Entry{id, dst, false, cur_token(), {}});
            sink.on_load(id, dst, b, w, QAtom{true, v, 0, b});
            return;
        }
        const FunDef& f = fun_def(e->callee);
        std::vector<uval> args = eval_args(e);
        sink.on_call_begin();
        calls.push_back({});
        uint64_t mark = next_entry;
        QAtom ret;
        Entry en;
        {
            FrameGuard frame(*this, f, args);
            const StmtPtr* rs = nullptr;
            for (auto& s : f.body) {
                if (s->kind == St::Ret) {
                    rs = &s;
                    break;
                }
                walk_stmt(s);
            }
            assert(rs && (*rs)->rhs);
            auto [rinst, relem] = resolve((*rs)->rhs->lv, (*rs)->line);
            ret.is_const = false;
            ret.slot = top_slot(rinst, relem);
            ret.base = rinst->type.base;
            uint64_t id = next_entry++;
            Slot dst = mint();
            en = Entry{id, dst, false, cur_token(), reads_of({&ret})};
        }
        // Deliver the return copy, then unwind the callee's history effects.
        sink.on_call_end(en.id, en.slot, b, w, ret);
        CallFrame fr = std::move(calls.back());
        calls.pop_back();
        for (auto it = fr.pushes.rbegin(); it != fr.pushes.rend(); ++it) {
            auto& h = it->first->hist[it->second];
            if (!h.empty() && h.back().id >= mark) {
                bump(h.back().slot);
                h.pop_back();
            }
        }
        for (auto it = fr.c_writes.rbegin(); it != fr.c_writes.rend(); ++it)
            it->inst->cvals[it->elem] = it->old;
        // The copy's operand record is already stale (the unwind reset the
        // return register), so a later inv of the destination is rejected.
        push_entry(dinst, delem, std::move(en));
    }

    // ---- statements ----

    void walk_stmt(const StmtPtr& s) {
        switch (s->kind) {
            case St::Decl: {
                auto inst = std::make_shared<Inst>();
                inst->type = s->type;
                inst->len = s->type.array_len ? s->type.array_len : 1;
                if (s->type.mode == Mode::C) {
                    inst->cvals.assign(inst->len, 0);
                    if (s->init)
                        inst->cvals[0] = is_user_call(s->init)
                                             ? classical_call(s->init)
                                             : eval(s->init).v;
                    scopes.back()[s->name] = inst;
                    return;
                }
                inst->hist.resize(inst->len);
                inst->base.assign(inst->len, 0);
                inst->pushes.assign(inst->len, 0);
                if (s->init) q_store(inst.get(), 0, s->init, s->line);
                scopes.back()[s->name] = inst;
                return;
            }
            case St::Assign: {
                auto [inst, elem] = resolve(s->lv, s->line);
                if (inst->type.mode == Mode::C) {
                    uval v = is_user_call(s->rhs) ? classical_call(s->rhs)
                                                  : eval(s->rhs).v;
                    note_c_write(inst, elem);
                    inst->cvals[elem] = v;
                    return;
                }
                q_store(inst, elem, s->rhs, s->line);
                return;
            }
            case St::OpAssign: {
                auto [inst, elem] = resolve(s->lv, s->line);
                if (inst->type.mode == Mode::C) {
                    uval rv = eval(s->rhs).v;
                    auto r = apply_bop(s->op, inst->type.base, inst->cvals[elem],
                                       rv, sz);
                    if (!r) fail("division by zero");
                    note_c_write(inst, elem);
                    inst->cvals[elem] = *r;
                    return;
                }
                q_op_assign(s);
                return;
            }
            case St::If: {
                bool q_guard = s->cond->kind == Ex::Load &&
                               find(s->cond->lv.var)->type.mode == Mode::Q;
                if (!q_guard) {
                    bool taken = eval(s->cond).v != 0;
                    walk_block(taken ? s->then_body : s->else_body);
                    return;
                }
                auto [ginst, gelem] = resolve(s->cond->lv, s->cond->line);
                Slot g = top_slot(ginst, gelem);
                sink.on_if_begin(g);
                tokens.push_back(next_token++);
                walk_block(s->then_body);
                tokens.pop_back();
                if (!s->else_body.empty()) {
                    sink.on_if_else();
                    tokens.push_back(next_token++);
                    walk_block(s->else_body);
                    tokens.pop_back();
                }
                sink.on_if_end();
                return;
            }
            case St::For: {
                uval i = eval(s->init).v;
                uint64_t iters = 0;
                for (;;) {
                    uval bound = eval(s->bound).v;
                    if (!*apply_bop(s->cmp, Base::Nat, i, bound, sz)) break;
                    if (++iters > (1ull << 20))
                        fail("loop exceeded the iteration budget (2^20)");
                    scopes.emplace_back();
                    auto ci = std::make_shared<Inst>();
                    ci->type = {Base::Nat, Mode::C};
                    ci->cvals.assign(1, i);
                    scopes.back()[s->name] = ci;
                    for (auto& st : s->then_body) walk_stmt(st);
                    scopes.pop_back();
                    i = *apply_bop(s->step_op, Base::Nat, i, eval(s->step).v, sz);
                }
                return;
            }
            case St::Inv:
                q_inv(s);
                return;
            case St::Ret:
                return;  // only reachable as the entry function's footer
        }
    }

    void walk_block(const Block& b) {
        scopes.emplace_back();
        for (auto& s : b) walk_stmt(s);
        scopes.pop_back();
    }

    // ---- program ----

    WalkResult run(const std::map<std::string, uval>& overrides) {
        for (auto& [name, v] : overrides) {
            auto it = P.global_types.find(name);
            if (it == P.global_types.end())
                throw qimp_error("override", "no such global: " + name, 0);
            if (it->second.mode != Mode::C || it->second.array_len)
                throw qimp_error("override",
                                 name + " is not a scalar C-mode global", 0);
        }
        WalkResult out;
        try {
            scopes.emplace_back();
            for (auto& g : P.prog.globals) {
                auto inst = std::make_shared<Inst>();
                inst->type = g.type;
                inst->len = g.type.array_len ? g.type.array_len : 1;
                if (g.type.mode == Mode::C) {
                    inst->cvals.assign(inst->len, 0);
                    auto ov = overrides.find(g.name);
                    if (ov != overrides.end())
                        inst->cvals[0] = ov->second & word_mask(sz);
                    else if (g.init)
                        inst->cvals[0] = eval(g.init).v;
                    scopes.back()[g.name] = inst;
                    continue;
                }
                inst->hist.resize(inst->len);
                inst->base.assign(inst->len, 0);
                inst->pushes.assign(inst->len, 0);
                if (g.init) {
                    q_store(inst.get(), 0, g.init, g.line);
                } else {
                    for (uint32_t k = 0; k < inst->len; ++k) {
                        inst->base[k] = mint();
                        sink.on_input(inst->base[k], g.name, k, g.type.base,
                                      width_of(g.type.base));
                    }
                }
                scopes.back()[g.name] = inst;
            }
            const FunDef& entry = P.prog.funs.back();
            scopes.emplace_back();
            for (auto& s : entry.body)
                if (s->kind != St::Ret) walk_stmt(s);
            scopes.pop_back();
            for (auto& g : P.prog.globals) {
                Inst* inst = scopes[0].at(g.name).get();
                if (g.type.mode == Mode::C) {
                    out.c_final[g.name] = inst->cvals;
                } else {
                    std::vector<Slot> tops;
                    for (uint32_t k = 0; k < inst->len; ++k)
                        tops.push_back(top_slot(inst, k));
                    out.q_final[g.name] = std::move(tops);
                }
            }
        } catch (const ClassicalError& ce) {
            out.error = ce.msg;
        }
        return out;
    }
};

}  // namespace

WalkResult walk_program(const CheckedProgram& p, uint32_t sz,
                        const std::map<std::string, uval>& c_overrides,
                        Sink& sink) {
    Walker w(p, sz, sink);
    return w.run(c_overrides);
}

// check_inv rides the walk with a do-nothing sink: every history rule is
// enforced by the walker itself along the classically resolved path.
void check_inv(const CheckedProgram& p, uint32_t sz,
               const std::map<std::string, uval>& c_overrides) {
    Sink nothing;
    WalkResult r = walk_program(p, sz, c_overrides, nothing);
    if (r.error) throw qimp_error("run", *r.error, 0);
}

}  // namespace oq::qimp
