#include "oq/typing.hpp"

#include <sstream>

namespace oq {

std::string Basis::str() const {
    if (kind == BasisKind::Nor) return "Nor";
    return "Phi " + std::to_string(precision);
}

TypeEnv all_nor(const Registers& regs) {
    return TypeEnv(regs.count(), Basis::nor());
}

namespace {

struct Checker {
    const Registers& regs;
    uint64_t index = 0;  // leaf instruction counter in execution order

    std::optional<TypeError> fail(const std::string& rule, const std::string& msg) {
        return TypeError{rule, msg, index};
    }

    std::optional<TypeError> check_pos(const Position& p, const std::string& rule) {
        if (p.var >= regs.count())
            return fail(rule, "unknown register index " + std::to_string(p.var));
        if (p.offset >= regs.size_of(p.var)) {
            std::ostringstream os;
            os << "offset " << p.offset << " out of range for register "
               << regs.name_of(p.var) << " of size " << regs.size_of(p.var);
            return fail(rule, os.str());
        }
        return std::nullopt;
    }

    std::optional<TypeError> check_var(Var x, const std::string& rule) {
        if (x >= regs.count())
            return fail(rule, "unknown register index " + std::to_string(x));
        return std::nullopt;
    }

    std::optional<TypeError> expect_nor(Var x, const Basis& b, const std::string& rule) {
        if (b.kind != BasisKind::Nor) {
            std::ostringstream os;
            os << "register " << regs.name_of(x) << " expected Nor, actual " << b.str();
            return fail(rule, os.str());
        }
        return std::nullopt;
    }

    // Typechecks `i`, mutating `env`. Returns an error or nullopt.
    std::optional<TypeError> run(const InstrPtr& i, TypeEnv& env) {
        switch (i->op) {
            case Op::Seq: {
                if (auto e = run(i->left, env)) return e;
                return run(i->right, env);
            }
            case Op::Skip: {
                ++index;
                return check_pos(i->pos, "skip-pos");
            }
            case Op::X: {
                ++index;
                if (auto e = check_pos(i->pos, "x-pos")) return e;
                return expect_nor(i->pos.var, env[i->pos.var], "x-nor");
            }
            case Op::SR:
            case Op::SRI: {
                ++index;
                const char* rule = i->op == Op::SR ? "sr-phi" : "sri-phi";
                if (auto e = check_var(i->var, rule)) return e;
                const Basis& b = env[i->var];
                if (b.kind != BasisKind::Phi) {
                    std::ostringstream os;
                    os << "register " << regs.name_of(i->var)
                       << " expected Phi, actual " << b.str();
                    return fail(rule, os.str());
                }
                if (i->num >= b.precision) {
                    std::ostringstream os;
                    os << "cascade index " << i->num << " must be below precision "
                       << b.precision << " on register " << regs.name_of(i->var);
                    return fail(i->op == Op::SR ? "sr-bound" : "sri-bound", os.str());
                }
                return std::nullopt;
            }
            case Op::QFT: {
                ++index;
                if (auto e = check_var(i->var, "qft-nor")) return e;
                if (auto e = expect_nor(i->var, env[i->var], "qft-nor")) return e;
                if (i->num == 0 || i->num > regs.size_of(i->var)) {
                    std::ostringstream os;
                    os << "precision " << i->num << " must be in [1, "
                       << regs.size_of(i->var) << "] on register " << regs.name_of(i->var);
                    return fail("qft-precision", os.str());
                }
                env[i->var] = Basis::phi(i->num);
                return std::nullopt;
            }
            case Op::QFTI: {
                ++index;
                if (auto e = check_var(i->var, "qfti-phi")) return e;
                const Basis& b = env[i->var];
                if (b != Basis::phi(i->num)) {
                    std::ostringstream os;
                    os << "register " << regs.name_of(i->var) << " expected Phi "
                       << i->num << ", actual " << b.str();
                    return fail("qfti-phi", os.str());
                }
                env[i->var] = Basis::nor();
                return std::nullopt;
            }
            case Op::Lshift:
            case Op::Rshift:
            case Op::Rev: {
                ++index;
                if (auto e = check_var(i->var, "shift-nor")) return e;
                return expect_nor(i->var, env[i->var], "shift-nor");
            }
            case Op::CU: {
                ++index;
                if (auto e = check_pos(i->pos, "cu-pos")) return e;
                if (auto e = expect_nor(i->pos.var, env[i->pos.var], "cu-ctrl-nor")) return e;
                if (!fresh(i->pos, i->left)) {
                    std::ostringstream os;
                    os << "control " << regs.name_of(i->pos.var) << "[" << i->pos.offset
                       << "] is touched by the controlled body";
                    return fail("cu-fresh", os.str());
                }
                if (!neutral(regs, i->left))
                    return fail("cu-neutral",
                                "controlled body applies a net offset permutation");
                TypeEnv body_env = env;
                if (auto e = run(i->left, body_env)) return e;
                if (body_env != env)
                    return fail("cu-env",
                                "controlled body must leave every register basis unchanged");
                return std::nullopt;
            }
        }
        return fail("internal", "unhandled instruction");
    }
};

}  // namespace

TypecheckResult typecheck(const Registers& regs, const TypeEnv& env, const InstrPtr& prog) {
    if (!prog) return TypeError{"internal", "null program", 0};
    if (env.size() != regs.count())
        return TypeError{"internal", "environment size does not match register table", 0};
    Checker c{regs};
    TypeEnv out = env;
    if (auto e = c.run(prog, out)) return *e;
    return out;
}

bool fresh(const Position& p, const InstrPtr& body) {
    if (!body) return true;
    switch (body->op) {
        case Op::Seq:
            return fresh(p, body->left) && fresh(p, body->right);
        case Op::Skip:
        case Op::X:
            return body->pos != p;
        case Op::SR:
        case Op::SRI:
            // The cascade rotates offsets 0..m.
            return body->var != p.var || p.offset > body->num;
        case Op::QFT:
        case Op::QFTI:
        case Op::Lshift:
        case Op::Rshift:
        case Op::Rev:
            // Whole-register operations (the transform also sends offsets past
            // its precision through Hadamard).
            return body->var != p.var;
        case Op::CU:
            return body->pos != p && fresh(p, body->left);
    }
    return false;
}

namespace {

// Net offset permutation per register as i -> sign*i + shift (mod size).
struct Perm {
    int64_t sign = 1;
    int64_t shift = 0;
};

}  // namespace

bool neutral(const Registers& regs, const InstrPtr& body) {
    if (!body) return true;
    std::vector<Perm> net(regs.count());
    std::vector<const Instr*> stack{body.get()};
    // The stack is processed so that execution order is Seq-left before
    // Seq-right; for composing commutative-enough bookkeeping (group
    // composition per register is order-sensitive, so keep real order).
    std::vector<const Instr*> order;
    while (!stack.empty()) {
        const Instr* cur = stack.back();
        stack.pop_back();
        if (cur->op == Op::Seq) {
            stack.push_back(cur->right.get());
            stack.push_back(cur->left.get());
        } else {
            order.push_back(cur);
        }
    }
    for (const Instr* cur : order) {
        switch (cur->op) {
            case Op::Lshift: {
                if (cur->var >= regs.count()) return false;
                Perm& p = net[cur->var];
                p.shift += p.sign;
                break;
            }
            case Op::Rshift: {
                if (cur->var >= regs.count()) return false;
                Perm& p = net[cur->var];
                p.shift -= p.sign;
                break;
            }
            case Op::Rev: {
                if (cur->var >= regs.count()) return false;
                Perm& p = net[cur->var];
                int64_t n = regs.size_of(cur->var);
                p.shift += p.sign * (n - 1);
                p.sign = -p.sign;
                break;
            }
            case Op::CU:
                // Both branches of a control must agree: the untaken branch is
                // the identity, so the taken body must itself be neutral.
                if (!neutral(regs, cur->left)) return false;
                break;
            default:
                break;
        }
    }
    for (Var v = 0; v < regs.count(); ++v) {
        int64_t n = regs.size_of(v);
        if (((net[v].shift % n) + n) % n != 0) return false;
        // On one or two offsets a reflection coincides with a rotation, so the
        // sign only matters for larger registers.
        if (net[v].sign != 1 && n > 2) return false;
    }
    return true;
}

}  // namespace oq
