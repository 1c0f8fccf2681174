#include "oq/qimp_val.hpp"

namespace oq::qimp {

const char* base_name(Base b) {
    switch (b) {
        case Base::Nat: return "nat";
        case Base::Fixedp: return "fixedp";
        case Base::Bool: return "bool";
    }
    return "?";
}

const char* mode_name(Mode m) { return m == Mode::C ? "C" : "Q"; }

std::string type_name(const Type& t) {
    std::string s = std::string(mode_name(t.mode)) + " " + base_name(t.base);
    if (t.array_len) s += "[" + std::to_string(t.array_len) + "]";
    return s;
}

const char* bop_name(Bop op) {
    switch (op) {
        case Bop::Add: return "+";
        case Bop::Sub: return "-";
        case Bop::Mul: return "*";
        case Bop::Div: return "/";
        case Bop::Mod: return "%";
        case Bop::Xor: return "^";
        case Bop::Lt: return "<";
        case Bop::Le: return "<=";
        case Bop::Gt: return ">";
        case Bop::Ge: return ">=";
        case Bop::Eq: return "==";
        case Bop::Ne: return "!=";
        case Bop::RotL: return "<<<";
        case Bop::RotR: return ">>>";
    }
    return "?";
}

uval scale_fixed_literal(const std::string& text, uint32_t sz, int line) {
    std::string t = text;
    bool neg = false;
    if (!t.empty() && t[0] == '-') {
        neg = true;
        t = t.substr(1);
    }
    auto dot = t.find('.');
    if (dot == std::string::npos)
        throw qimp_error("syntax", "fixedp literal needs a decimal point: " + text, line);
    std::string ip = t.substr(0, dot), fp = t.substr(dot + 1);
    if (ip.empty() || fp.empty() || ip.find_first_not_of("0123456789") != std::string::npos ||
        fp.find_first_not_of("0123456789") != std::string::npos)
        throw qimp_error("syntax", "malformed fixedp literal: " + text, line);
    if (fp.size() > 18) fp = fp.substr(0, 18);  // < 2^60: exact in uval
    uval digits = 0, den = 1;
    for (char c : fp) {
        digits = digits * 10 + uval(c - '0');
        den *= 10;
    }
    uval whole = 0;
    for (char c : ip) whole = whole * 10 + uval(c - '0');
    // round-to-nearest numerator of (whole + digits/den) * 2^(sz-1)
    uval m = whole * pow2(sz - 1) + (digits * pow2(sz - 1) + den / 2) / den;
    uval half = pow2(sz - 1);
    if ((!neg && m >= half) || (neg && m > half))
        throw qimp_error("range", "fixedp literal outside [-1, 1): " + text, line);
    if (neg && m > 0) m = (pow2(sz) - m);
    return m & word_mask(sz);
}

uval fx_mul(uval m1, uval m2, uint32_t sz) {
    // Two's-complement product: the unsigned product plus sign corrections
    // gives the signed product mod 2^(2sz); extracting bits sz-1 and up is
    // then a floor division by 2^(sz-1) (shift of a two's-complement word).
    uval prod = m1 * m2;
    uval half = pow2(sz - 1);
    if (m1 & half) prod -= m2 << sz;
    if (m2 & half) prod -= m1 << sz;
    prod &= mask_bits(2 * sz);
    return (prod >> (sz - 1)) & word_mask(sz);
}

uval div_floor(uval v, uval d) { return v / d; }

bool fx_lt(uval a, uval b, uint32_t sz) {
    uval bias = pow2(sz - 1);
    return ((a ^ bias) & word_mask(sz)) < ((b ^ bias) & word_mask(sz));
}

uval pow_word(uval a, uval b, uint32_t sz) {
    uval r = 1 & word_mask(sz), base = a & word_mask(sz);
    uval e = b;
    while (e) {
        if (e & 1) r = (r * base) & word_mask(sz);
        base = (base * base) & word_mask(sz);
        e >>= 1;
    }
    return r;
}

std::optional<uval> apply_bop(Bop op, Base base, uval a, uval b, uint32_t sz) {
    uval mask = base == Base::Bool ? 1 : word_mask(sz);
    a &= mask;
    b &= mask;
    bool fx = base == Base::Fixedp;
    switch (op) {
        case Bop::Add: return (a + b) & mask;
        case Bop::Sub: return (a - b) & mask;
        case Bop::Xor: return a ^ b;
        case Bop::Mul:
            return fx ? fx_mul(a, b, sz) : (a * b) & mask;
        case Bop::Div:
            if (b == 0) return std::nullopt;
            if (fx) {
                // two's-complement numerator divided by a plain natural,
                // rounded toward negative infinity
                uval half = pow2(sz - 1);
                if (a < half) return (a / b) & mask;
                uval q = (pow2(sz) - a + b - 1) / b;  // ceil(|m| / b)
                return (pow2(sz) - q) & mask;
            }
            return div_floor(a, b) & mask;
        case Bop::Mod:
            if (b == 0) return std::nullopt;
            return (a % b) & mask;
        case Bop::Lt: return uval(fx ? fx_lt(a, b, sz) : a < b);
        case Bop::Le: return uval(fx ? !fx_lt(b, a, sz) : a <= b);
        case Bop::Gt: return uval(fx ? fx_lt(b, a, sz) : a > b);
        case Bop::Ge: return uval(fx ? !fx_lt(a, b, sz) : a >= b);
        case Bop::Eq: return uval(a == b);
        case Bop::Ne: return uval(a != b);
        case Bop::RotL: {
            uint32_t k = uint32_t(lo64(b) % sz);
            return ((a << k) | (a >> (sz - k))) & mask;
        }
        case Bop::RotR: {
            uint32_t k = uint32_t(lo64(b) % sz);
            return ((a >> k) | (a << (sz - k))) & mask;
        }
    }
    return std::nullopt;
}

ExprPtr make_num(uval v, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Ex::Num;
    e->num = v;
    e->line = line;
    return e;
}

ExprPtr make_fix(std::string text, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Ex::Fix;
    e->text = std::move(text);
    e->line = line;
    return e;
}

ExprPtr make_bool(bool v, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Ex::BoolLit;
    e->num = v ? 1 : 0;
    e->line = line;
    return e;
}

ExprPtr make_load(Lval lv, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Ex::Load;
    e->lv = std::move(lv);
    e->line = line;
    return e;
}

ExprPtr make_bin(Bop op, ExprPtr a, ExprPtr b, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Ex::Bin;
    e->op = op;
    e->a = std::move(a);
    e->b = std::move(b);
    e->line = line;
    return e;
}

ExprPtr make_call(std::string callee, std::vector<ExprPtr> args, int line) {
    auto e = std::make_shared<Expr>();
    e->kind = Ex::Call;
    e->callee = std::move(callee);
    e->args = std::move(args);
    e->line = line;
    return e;
}

static StmtPtr blank(St kind, int line) {
    auto s = std::make_shared<Stmt>();
    s->kind = kind;
    s->line = line;
    return s;
}

StmtPtr make_decl(Type t, std::string name, ExprPtr init, int line) {
    auto s = blank(St::Decl, line);
    auto* m = const_cast<Stmt*>(s.get());
    m->type = t;
    m->name = std::move(name);
    m->init = std::move(init);
    return s;
}

StmtPtr make_assign(Lval lv, ExprPtr rhs, int line) {
    auto s = blank(St::Assign, line);
    auto* m = const_cast<Stmt*>(s.get());
    m->lv = std::move(lv);
    m->rhs = std::move(rhs);
    return s;
}

StmtPtr make_op_assign(Lval lv, Bop op, ExprPtr rhs, int line) {
    auto s = blank(St::OpAssign, line);
    auto* m = const_cast<Stmt*>(s.get());
    m->lv = std::move(lv);
    m->op = op;
    m->rhs = std::move(rhs);
    return s;
}

StmtPtr make_if(ExprPtr cond, Block then_body, Block else_body, int line) {
    auto s = blank(St::If, line);
    auto* m = const_cast<Stmt*>(s.get());
    m->cond = std::move(cond);
    m->then_body = std::move(then_body);
    m->else_body = std::move(else_body);
    return s;
}

StmtPtr make_for(std::string var, ExprPtr init, Bop cmp, ExprPtr bound,
                 Bop step_op, ExprPtr step, Block body, int line) {
    auto s = blank(St::For, line);
    auto* m = const_cast<Stmt*>(s.get());
    m->name = std::move(var);
    m->init = std::move(init);
    m->cmp = cmp;
    m->bound = std::move(bound);
    m->step_op = step_op;
    m->step = std::move(step);
    m->then_body = std::move(body);
    return s;
}

StmtPtr make_inv(Lval lv, int line) {
    auto s = blank(St::Inv, line);
    const_cast<Stmt*>(s.get())->lv = std::move(lv);
    return s;
}

StmtPtr make_ret(ExprPtr rhs, int line) {
    auto s = blank(St::Ret, line);
    const_cast<Stmt*>(s.get())->rhs = std::move(rhs);
    return s;
}

const std::map<std::string, BuiltinSig>& builtin_sigs() {
    static const std::map<std::string, BuiltinSig> sigs = {
        {"pow", {2, Base::Nat}},
        {"frac", {2, Base::Fixedp}},
        {"even", {1, Base::Bool}},
        {"odd", {1, Base::Bool}},
    };
    return sigs;
}

std::optional<uval> eval_builtin(const std::string& name,
                                 const std::vector<uval>& args, uint32_t sz) {
    uval mask = word_mask(sz);
    if (name == "pow") return pow_word(args[0], args[1], sz);
    if (name == "frac") {
        uval a = args[0] & mask, b = args[1] & mask;
        if (b == 0 || a >= b) return std::nullopt;
        return (a * pow2(sz - 1)) / b;
    }
    if (name == "even") return uval((args[0] & 1) == 0);
    if (name == "odd") return uval(args[0] & 1);
    return std::nullopt;
}

}  // namespace oq::qimp
