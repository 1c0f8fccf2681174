#include "oq/qimp_check.hpp"

#include <set>

#include "oq/qimp_val.hpp"

namespace oq::qimp {
namespace {

[[noreturn]] void err(const char* rule, const std::string& msg, int line) {
    throw qimp_error(rule, msg, line);
}

struct Scope {
    std::map<std::string, Type> vars;
};

struct Checker {
    CheckedProgram out;
    std::vector<Scope> scopes;  // front = globals, back = innermost
    std::set<std::string> loop_counters;
    std::vector<std::string> frozen_guards;  // Q-guard vars of enclosing ifs
    int temp_counter = 0;
    bool saw_q = false;
    int q_guard_depth = 0;

    // A quantum-controlled body must commute with its control, so the guard
    // variable is read-only inside its own branches.
    void check_not_guard(const std::string& name, int line) const {
        for (auto& g : frozen_guards)
            if (g == name)
                err("if",
                    "the guard variable " + name +
                        " may not be written inside its own branches",
                    line);
    }

    const Type* lookup(const std::string& name) const {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto f = it->vars.find(name);
            if (f != it->vars.end()) return &f->second;
        }
        return nullptr;
    }

    void declare(const std::string& name, Type t, int line) {
        if (lookup(name)) err("shadow", "redeclaration of " + name, line);
        scopes.back().vars[name] = t;
    }

    // ---- typing ----

    Type lval_type(const Lval& lv, int line) {
        const Type* t = lookup(lv.var);
        if (!t) err("unbound", "unknown variable " + lv.var, line);
        if (t->array_len) {
            if (!lv.index) err("mode", lv.var + " is an array and needs an index", line);
            Type it = type_of(lv.index);
            if (it.base != Base::Nat || it.mode != Mode::C)
                err("mode", "array indices must be C-mode nat", line);
            Type elem = *t;
            elem.array_len = 0;
            return elem;
        }
        if (lv.index) err("mode", lv.var + " is not an array", line);
        return *t;
    }

    Type type_of(const ExprPtr& e) {
        switch (e->kind) {
            case Ex::Num: return {Base::Nat, Mode::C};
            case Ex::Fix: return {Base::Fixedp, Mode::C};
            case Ex::BoolLit: return {Base::Bool, Mode::C};
            case Ex::Load: return lval_type(e->lv, e->line);
            case Ex::Bin: return bin_type(e);
            case Ex::Call: return call_type(e);
        }
        err("syntax", "malformed expression", e->line);
    }

    Type bin_type(const ExprPtr& e) {
        Type ta = type_of(e->a), tb = type_of(e->b);
        Mode m = (ta.mode == Mode::Q || tb.mode == Mode::Q) ? Mode::Q : Mode::C;
        auto need = [&](bool ok, const char* what) {
            if (!ok)
                err("binop",
                    std::string(what) + " for operator " + bop_name(e->op), e->line);
        };
        switch (e->op) {
            case Bop::Add:
            case Bop::Sub:
            case Bop::Mul:
                need(ta.base == tb.base && ta.base != Base::Bool,
                     "operands must share a numeric base");
                return {ta.base, m};
            case Bop::Xor:
                need(ta.base == tb.base && ta.base != Base::Fixedp,
                     "operands must both be nat or both bool");
                return {ta.base, m};
            case Bop::Div:
                need(ta.base != Base::Bool && tb.base == Base::Nat,
                     "expects nat/nat or fixedp/nat");
                if (tb.mode != Mode::C)
                    err("div", "the divisor must be compile-time (C mode)", e->line);
                return {ta.base, m};
            case Bop::Mod:
                need(ta.base == Base::Nat && tb.base == Base::Nat, "expects nat operands");
                if (tb.mode != Mode::C)
                    err("div", "the divisor must be compile-time (C mode)", e->line);
                return {Base::Nat, m};
            case Bop::Lt:
            case Bop::Le:
            case Bop::Gt:
            case Bop::Ge:
                need(ta.base == tb.base && ta.base != Base::Bool,
                     "comparisons need a shared numeric base");
                return {Base::Bool, m};
            case Bop::Eq:
            case Bop::Ne:
                need(ta.base == tb.base, "operands must share a base");
                return {Base::Bool, m};
            case Bop::RotL:
            case Bop::RotR:
                err("binop", "rotation exists only as <<<= / >>>=", e->line);
        }
        err("binop", "unknown operator", e->line);
    }

    Type call_type(const ExprPtr& e) {
        auto& sigs = builtin_sigs();
        auto it = sigs.find(e->callee);
        if (it == sigs.end())
            err("call",
                "function calls cannot be nested inside expressions: " + e->callee,
                e->line);
        if (int(e->args.size()) != it->second.arity)
            err("call", e->callee + " expects " + std::to_string(it->second.arity) +
                            " argument(s)",
                e->line);
        for (auto& a : e->args) {
            Type t = type_of(a);
            if (t.mode != Mode::C || t.base != Base::Nat)
                err("call", e->callee + " takes C-mode nat arguments", e->line);
        }
        return {it->second.result, Mode::C};
    }

    // ---- helpers ----

    static bool loads_name(const ExprPtr& e, const std::string& name) {
        if (!e) return false;
        switch (e->kind) {
            case Ex::Load:
                return e->lv.var == name || loads_name(e->lv.index, name);
            case Ex::Bin:
                return loads_name(e->a, name) || loads_name(e->b, name);
            case Ex::Call:
                for (auto& a : e->args)
                    if (loads_name(a, name)) return true;
                return false;
            default:
                return false;
        }
    }

    bool is_c(const ExprPtr& e) { return type_of(e).mode == Mode::C; }

    // (e1 * e2) / M on fixedp with a compile-time nat divisor becomes
    // (e1 / M) * e2, steering a compile-time operand into the division so
    // it folds to a constant and the multiply becomes a constant multiply.
    ExprPtr fold_fx_div(const ExprPtr& e) {
        if (!e || e->kind != Ex::Bin) return e;
        ExprPtr a = fold_fx_div(e->a);
        ExprPtr b = fold_fx_div(e->b);
        if (e->op == Bop::Div && a->kind == Ex::Bin && a->op == Bop::Mul) {
            Type tm = type_of(a);
            if (tm.base == Base::Fixedp && tm.mode == Mode::Q &&
                type_of(b).mode == Mode::C) {
                ExprPtr e1 = a->a, e2 = a->b;
                if (is_c(e2) && !is_c(e1)) std::swap(e1, e2);
                return make_bin(Bop::Mul, make_bin(Bop::Div, e1, b, e->line), e2,
                                e->line);
            }
        }
        if (a == e->a && b == e->b) return e;
        return make_bin(e->op, a, b, e->line);
    }

    // ---- elaboration ----

    bool is_atom(const ExprPtr& e) {
        if (is_c(e)) return true;  // classical subtree, evaluated at walk time
        return e->kind == Ex::Load;
    }

    ExprPtr atomize(const ExprPtr& e, Block& pre, std::vector<StmtPtr>& post) {
        if (is_atom(e)) return e;
        ExprPtr rhs = flat_rhs(e, pre, post);
        Type t = type_of(e);
        std::string name = "__t" + std::to_string(temp_counter++);
        pre.push_back(make_decl(t, name, rhs, e->line));
        declare(name, t, e->line);
        post.push_back(make_inv(Lval{name, nullptr}, e->line));
        saw_q = true;
        return make_load(Lval{name, nullptr}, e->line);
    }

    // Flattens a Q-mode expression to atom / binop-of-atoms.
    ExprPtr flat_rhs(const ExprPtr& e, Block& pre, std::vector<StmtPtr>& post) {
        if (is_atom(e)) return e;
        if (e->kind == Ex::Bin) {
            ExprPtr a = atomize(e->a, pre, post);
            ExprPtr b = atomize(e->b, pre, post);
            if (a == e->a && b == e->b) return e;
            return make_bin(e->op, a, b, e->line);
        }
        err("call", "unsupported expression form", e->line);
    }

    // Validates a statement-level call to a user-defined function.
    void check_user_call(const ExprPtr& e, const Type& dst, int line) {
        auto it = out.funs.find(e->callee);
        if (it == out.funs.end())
            err("call", "unknown function " + e->callee +
                            " (callees must be defined above their first use)",
                line);
        const FunInfo& fi = it->second;
        if (!fi.ret_type)
            err("call", e->callee + " does not return a value", line);
        if (e->args.size() != fi.param_types.size())
            err("call", "arity mismatch calling " + e->callee, line);
        for (size_t i = 0; i < e->args.size(); ++i) {
            Type at = type_of(e->args[i]);
            if (at.mode != Mode::C)
                err("call", "arguments must be C-mode", e->args[i]->line);
            if (at.base != fi.param_types[i].base)
                err("call", "argument base mismatch calling " + e->callee,
                    e->args[i]->line);
        }
        if (fi.ret_type->mode == Mode::Q && dst.mode == Mode::C)
            err("call", "cannot bind the Q result of " + e->callee +
                            " to a C variable",
                line);
        if (fi.ret_type->base != dst.base)
            err("call", "return base mismatch calling " + e->callee, line);
    }

    bool is_user_call(const ExprPtr& e) const {
        return e->kind == Ex::Call && !builtin_sigs().count(e->callee);
    }

    void emit_q_assign(const Lval& lv, Type dt, const ExprPtr& rhs0, int line,
                       Block& out_b, bool is_decl, const Type& decl_type,
                       const std::string& decl_name) {
        saw_q = true;
        const std::string& dst = is_decl ? decl_name : lv.var;
        if (is_user_call(rhs0)) {
            check_user_call(rhs0, dt, line);
            if (is_decl) {
                out_b.push_back(make_decl(decl_type, decl_name, rhs0, line));
                declare(decl_name, decl_type, line);
            } else {
                out_b.push_back(make_assign(lv, rhs0, line));
            }
            return;
        }
        Type rt = type_of(rhs0);
        if (rt.base != dt.base) err("binop", "base mismatch in assignment", line);
        if (!is_decl && !lv.index && loads_name(rhs0, dst))
            err("binop_q",
                "destination " + dst + " may not appear among its own operands",
                line);
        Block pre;
        std::vector<StmtPtr> post;
        ExprPtr rhs = flat_rhs(fold_fx_div(rhs0), pre, post);
        for (auto& p : pre) out_b.push_back(p);
        if (is_decl) {
            out_b.push_back(make_decl(decl_type, decl_name, rhs, line));
            declare(decl_name, decl_type, line);
        } else {
            out_b.push_back(make_assign(lv, rhs, line));
        }
        for (auto it = post.rbegin(); it != post.rend(); ++it) out_b.push_back(*it);
    }

    void stmt(const StmtPtr& s, Block& out_b) {
        int line = s->line;
        switch (s->kind) {
            case St::Decl: {
                Type t = s->type;
                if (t.mode == Mode::C && q_guard_depth)
                    err("binop_c", "C-mode declaration under a Q-mode if", line);
                if (t.array_len && s->init)
                    err("mode", "arrays cannot take initializers", line);
                if (!s->init) {
                    declare(s->name, t, line);
                    if (t.mode == Mode::Q) saw_q = true;
                    out_b.push_back(s);
                    return;
                }
                if (t.mode == Mode::C) {
                    if (is_user_call(s->init)) {
                        check_user_call(s->init, t, line);
                    } else {
                        Type ti = type_of(s->init);
                        if (ti.mode != Mode::C)
                            err("mode", "a C-mode initializer cannot read Q state",
                                line);
                        if (ti.base != t.base)
                            err("binop", "initializer base mismatch", line);
                    }
                    declare(s->name, t, line);
                    out_b.push_back(s);
                    return;
                }
                emit_q_assign(Lval{}, t, s->init, line, out_b, true, t, s->name);
                return;
            }
            case St::Assign: {
                if (loop_counters.count(s->lv.var))
                    err("for", "loop counters are read-only", line);
                Type dt = lval_type(s->lv, line);
                if (dt.mode == Mode::C) {
                    if (q_guard_depth)
                        err("binop_c", "C-mode assignment under a Q-mode if", line);
                    if (is_user_call(s->rhs)) {
                        check_user_call(s->rhs, dt, line);
                    } else {
                        Type rt = type_of(s->rhs);
                        if (rt.mode != Mode::C)
                            err("mode", "a C-mode assignment cannot read Q state",
                                line);
                        if (rt.base != dt.base)
                            err("binop", "base mismatch in assignment", line);
                    }
                    out_b.push_back(s);
                    return;
                }
                check_not_guard(s->lv.var, line);
                emit_q_assign(s->lv, dt, s->rhs, line, out_b, false, Type{}, "");
                return;
            }
            case St::OpAssign: {
                if (loop_counters.count(s->lv.var))
                    err("for", "loop counters are read-only", line);
                Type dt = lval_type(s->lv, line);
                Type rt = type_of(s->rhs);
                bool rot = s->op == Bop::RotL || s->op == Bop::RotR;
                if (rot) {
                    if (dt.base != Base::Nat)
                        err("binop", "rotation needs a nat destination", line);
                    if (rt.base != Base::Nat || rt.mode != Mode::C)
                        err("mode", "rotation amounts are C-mode nat", line);
                } else if (s->op == Bop::Xor) {
                    if (dt.base != rt.base || dt.base == Base::Fixedp)
                        err("binop", "^= needs matching nat or bool operands", line);
                } else {  // Add / Sub
                    if (dt.base != rt.base || dt.base == Base::Bool)
                        err("binop", "+=/-= need a shared numeric base", line);
                }
                if (dt.mode == Mode::C) {
                    if (q_guard_depth)
                        err("binop_c", "C-mode assignment under a Q-mode if", line);
                    if (rt.mode != Mode::C)
                        err("mode", "a C-mode assignment cannot read Q state", line);
                    out_b.push_back(s);
                    return;
                }
                saw_q = true;
                check_not_guard(s->lv.var, line);
                if (!s->lv.index && loads_name(s->rhs, s->lv.var))
                    err("binop_q",
                        "destination " + s->lv.var +
                            " may not appear among its own operands",
                        line);
                Block pre;
                std::vector<StmtPtr> post;
                ExprPtr v = atomize(fold_fx_div(s->rhs), pre, post);
                for (auto& p : pre) out_b.push_back(p);
                out_b.push_back(make_op_assign(s->lv, s->op, v, line));
                for (auto it = post.rbegin(); it != post.rend(); ++it)
                    out_b.push_back(*it);
                return;
            }
            case St::If: {
                Type ct = type_of(s->cond);
                if (ct.base != Base::Bool)
                    err("if", "the guard must be bool", line);
                if (ct.mode == Mode::C) {
                    out_b.push_back(make_if(s->cond, sub_block(s->then_body),
                                            sub_block(s->else_body), line));
                    return;
                }
                saw_q = true;
                Block pre;
                std::vector<StmtPtr> post;
                ExprPtr g = atomize(s->cond, pre, post);
                for (auto& p : pre) out_b.push_back(p);
                ++q_guard_depth;
                frozen_guards.push_back(g->lv.var);
                Block tb = sub_block(s->then_body);
                Block eb = sub_block(s->else_body);
                frozen_guards.pop_back();
                --q_guard_depth;
                out_b.push_back(make_if(g, std::move(tb), std::move(eb), line));
                for (auto it = post.rbegin(); it != post.rend(); ++it)
                    out_b.push_back(*it);
                return;
            }
            case St::For: {
                if (q_guard_depth)
                    err("binop_c",
                        "loops are classical control and cannot sit under a "
                        "Q-mode if",
                        line);
                auto c_nat = [&](const ExprPtr& e, const char* what) {
                    Type t = type_of(e);
                    if (t.mode != Mode::C || t.base != Base::Nat)
                        err("for", std::string(what) + " must be C-mode nat", line);
                };
                c_nat(s->init, "the loop start");
                scopes.emplace_back();
                declare(s->name, {Base::Nat, Mode::C}, line);
                loop_counters.insert(s->name);
                c_nat(s->bound, "the loop bound");
                c_nat(s->step, "the loop step");
                Block body;
                for (auto& b : s->then_body) stmt(b, body);
                loop_counters.erase(s->name);
                scopes.pop_back();
                out_b.push_back(make_for(s->name, s->init, s->cmp, s->bound,
                                         s->step_op, s->step, std::move(body),
                                         line));
                return;
            }
            case St::Inv: {
                Type t = lval_type(s->lv, line);
                if (t.mode != Mode::Q)
                    err("inv", "inv applies to Q-mode variables", line);
                check_not_guard(s->lv.var, line);
                saw_q = true;
                out_b.push_back(s);
                return;
            }
            case St::Ret:
                err("return", "return must be the final statement of a function",
                    line);
        }
    }

    Block sub_block(const Block& b) {
        scopes.emplace_back();
        Block out_b;
        for (auto& s : b) stmt(s, out_b);
        scopes.pop_back();
        return out_b;
    }

    void fun(const FunDef& f) {
        if (out.funs.count(f.name)) err("fun", "duplicate function " + f.name, f.line);
        if (builtin_sigs().count(f.name))
            err("fun", f.name + " is a builtin name", f.line);
        FunInfo fi;
        saw_q = false;
        temp_counter = 0;
        scopes.emplace_back();
        for (auto& [t, n] : f.params) {
            if (t.mode != Mode::C) err("fun", "parameters must be C-mode", f.line);
            if (t.array_len) err("fun", "array parameters are unsupported", f.line);
            declare(n, t, f.line);
            fi.param_types.push_back(t);
        }
        FunDef nf;
        nf.name = f.name;
        nf.params = f.params;
        nf.line = f.line;
        for (size_t i = 0; i < f.body.size(); ++i) {
            const StmtPtr& s = f.body[i];
            if (s->kind == St::Ret) {
                if (i + 1 != f.body.size())
                    err("return", "return must be the final statement", s->line);
                if (s->rhs) {
                    if (s->rhs->kind != Ex::Load)
                        err("return", "return takes a plain variable", s->line);
                    fi.ret_type = lval_type(s->rhs->lv, s->line);
                }
                nf.body.push_back(s);
            } else {
                stmt(s, nf.body);
            }
        }
        scopes.pop_back();
        fi.pure_c = !saw_q;
        if (fi.ret_type && fi.ret_type->mode == Mode::C && !fi.pure_c)
            err("fun",
                f.name + " returns a C value and so must have a classical body",
                f.line);
        out.funs[f.name] = fi;
        out.prog.funs.push_back(std::move(nf));
    }

    void run(const Program& prog) {
        scopes.emplace_back();
        for (auto& g : prog.globals) {
            if (g.init) {
                if (g.type.array_len)
                    err("mode", "arrays cannot take initializers", g.line);
                Type ti = type_of(g.init);
                if (ti.mode != Mode::C)
                    err("mode", "global initializers are compile-time", g.line);
                if (ti.base != g.type.base)
                    err("binop", "initializer base mismatch", g.line);
            }
            declare(g.name, g.type, g.line);
            out.global_types[g.name] = g.type;
            if (g.type.mode == Mode::Q) out.q_globals.push_back(g.name);
            out.prog.globals.push_back(g);
        }
        for (auto& f : prog.funs) fun(f);
        if (!out.prog.funs.back().params.empty())
            err("fun", "the entry function takes no parameters",
                out.prog.funs.back().line);
    }
};

}  // namespace

CheckedProgram typecheck_program(const Program& prog) {
    Checker c;
    c.run(prog);
    return std::move(c.out);
}

}  // namespace oq::qimp
