#include "oq/qimp_parse.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace oq::qimp {
namespace {

enum class Tok : uint8_t { Ident, Int, Fixed, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    uval value = 0;
    int line = 1;
};

struct Lexer {
    std::string src;
    size_t pos = 0;
    int line = 1;
    Token cur;

    explicit Lexer(std::string s) : src(std::move(s)) { advance(); }

    [[noreturn]] void fail(const std::string& msg, int l) const {
        throw qimp_error("syntax", msg, l);
    }

    void skip_space() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '\n') {
                ++line;
                ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else if (c == '#' || (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/')) {
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    void advance() {
        skip_space();
        cur = Token{};
        cur.line = line;
        if (pos >= src.size()) {
            cur.kind = Tok::End;
            return;
        }
        char c = src[pos];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            cur.kind = Tok::Ident;
            cur.text = src.substr(start, pos - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            if (c == '0' && pos + 1 < src.size() && (src[pos + 1] == 'x' || src[pos + 1] == 'X')) {
                pos += 2;
                if (pos >= src.size() || !std::isxdigit(static_cast<unsigned char>(src[pos])))
                    fail("malformed hex literal", line);
                uval v = 0;
                while (pos < src.size() && std::isxdigit(static_cast<unsigned char>(src[pos]))) {
                    char d = src[pos++];
                    v = v * 16 + uval(d <= '9' ? d - '0' : (d | 0x20) - 'a' + 10);
                }
                cur.kind = Tok::Int;
                cur.value = v;
                cur.text = src.substr(start, pos - start);
                return;
            }
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            if (pos + 1 < src.size() && src[pos] == '.' &&
                std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
                ++pos;
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
                cur.kind = Tok::Fixed;
                cur.text = src.substr(start, pos - start);
                return;
            }
            uval v = 0;
            for (size_t i = start; i < pos; ++i) v = v * 10 + uval(src[i] - '0');
            cur.kind = Tok::Int;
            cur.value = v;
            cur.text = src.substr(start, pos - start);
            return;
        }
        // punctuation, longest match first
        static const char* puncts[] = {"<<<=", ">>>=", "<=", ">=", "==", "!=", "+=",
                                       "-=",  "^=",   "++", "--", "(",  ")",  "{",
                                       "}",   "[",    "]",  ";",  ",",  "=",  "+",
                                       "-",   "*",    "/",  "%",  "^",  "<",  ">"};
        for (const char* p : puncts) {
            size_t n = std::strlen(p);
            if (src.compare(pos, n, p) == 0) {
                cur.kind = Tok::Punct;
                cur.text = p;
                pos += n;
                return;
            }
        }
        fail(std::string("unexpected character '") + c + "'", line);
    }
};

struct Parser {
    Lexer lx;
    explicit Parser(std::string s) : lx(std::move(s)) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw qimp_error("syntax", msg, lx.cur.line);
    }

    bool at_punct(const char* p) const {
        return lx.cur.kind == Tok::Punct && lx.cur.text == p;
    }
    bool at_kw(const char* k) const {
        return lx.cur.kind == Tok::Ident && lx.cur.text == k;
    }
    bool eat_punct(const char* p) {
        if (!at_punct(p)) return false;
        lx.advance();
        return true;
    }
    void expect_punct(const char* p) {
        if (!eat_punct(p)) fail(std::string("expected '") + p + "' before '" + lx.cur.text + "'");
    }
    std::string expect_ident(const char* what) {
        if (lx.cur.kind != Tok::Ident) fail(std::string("expected ") + what);
        std::string s = lx.cur.text;
        if (s.rfind("__", 0) == 0) fail("identifiers starting with __ are reserved");
        lx.advance();
        return s;
    }

    bool at_type() const {
        return at_kw("C") || at_kw("Q");
    }

    Type parse_type() {
        Type t;
        if (at_kw("C")) t.mode = Mode::C;
        else if (at_kw("Q")) t.mode = Mode::Q;
        else fail("expected mode C or Q");
        lx.advance();
        if (at_kw("nat")) t.base = Base::Nat;
        else if (at_kw("fixedp")) t.base = Base::Fixedp;
        else if (at_kw("bool")) t.base = Base::Bool;
        else fail("expected base type nat, fixedp, or bool");
        lx.advance();
        return t;
    }

    Lval parse_lval_from(std::string name) {
        Lval lv;
        lv.var = std::move(name);
        if (eat_punct("[")) {
            lv.index = parse_expr();
            expect_punct("]");
        }
        return lv;
    }

    ExprPtr parse_primary() {
        int line = lx.cur.line;
        if (eat_punct("(")) {
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (eat_punct("-")) {
            if (lx.cur.kind != Tok::Fixed) fail("'-' is only supported on fixedp literals");
            std::string t = "-" + lx.cur.text;
            lx.advance();
            return make_fix(std::move(t), line);
        }
        if (lx.cur.kind == Tok::Int) {
            uval v = lx.cur.value;
            lx.advance();
            return make_num(v, line);
        }
        if (lx.cur.kind == Tok::Fixed) {
            std::string t = lx.cur.text;
            lx.advance();
            return make_fix(std::move(t), line);
        }
        if (at_kw("true") || at_kw("false")) {
            bool v = lx.cur.text == "true";
            lx.advance();
            return make_bool(v, line);
        }
        if (lx.cur.kind == Tok::Ident) {
            std::string name = expect_ident("expression");
            if (eat_punct("(")) {
                std::vector<ExprPtr> args;
                if (!at_punct(")")) {
                    do {
                        args.push_back(parse_expr());
                    } while (eat_punct(","));
                }
                expect_punct(")");
                return make_call(std::move(name), std::move(args), line);
            }
            return make_load(parse_lval_from(std::move(name)), line);
        }
        fail("expected expression before '" + lx.cur.text + "'");
    }

    ExprPtr parse_muldiv() {
        ExprPtr e = parse_primary();
        while (at_punct("*") || at_punct("/") || at_punct("%")) {
            int line = lx.cur.line;
            Bop op = lx.cur.text == "*" ? Bop::Mul : lx.cur.text == "/" ? Bop::Div : Bop::Mod;
            lx.advance();
            e = make_bin(op, e, parse_primary(), line);
        }
        return e;
    }

    ExprPtr parse_addsub() {
        ExprPtr e = parse_muldiv();
        while (at_punct("+") || at_punct("-") || at_punct("^")) {
            int line = lx.cur.line;
            Bop op = lx.cur.text == "+" ? Bop::Add : lx.cur.text == "-" ? Bop::Sub : Bop::Xor;
            lx.advance();
            e = make_bin(op, e, parse_muldiv(), line);
        }
        return e;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_addsub();
        static const std::pair<const char*, Bop> cmps[] = {
            {"<=", Bop::Le}, {">=", Bop::Ge}, {"==", Bop::Eq},
            {"!=", Bop::Ne}, {"<", Bop::Lt},  {">", Bop::Gt}};
        for (auto& [p, op] : cmps) {
            if (at_punct(p)) {
                int line = lx.cur.line;
                lx.advance();
                return make_bin(op, e, parse_addsub(), line);
            }
        }
        return e;
    }

    StmtPtr parse_decl(bool eat_semi) {
        int line = lx.cur.line;
        Type t = parse_type();
        std::string name = expect_ident("variable name");
        if (eat_punct("[")) {
            if (lx.cur.kind != Tok::Int || lx.cur.value == 0)
                fail("array length must be a positive integer literal");
            t.array_len = uint32_t(lo64(lx.cur.value));
            lx.advance();
            expect_punct("]");
        }
        ExprPtr init;
        if (eat_punct("=")) init = parse_expr();
        if (eat_semi) expect_punct(";");
        return make_decl(t, std::move(name), std::move(init), line);
    }

    Block parse_block() {
        expect_punct("{");
        Block b;
        while (!eat_punct("}")) {
            if (lx.cur.kind == Tok::End) fail("unexpected end of input inside block");
            b.push_back(parse_stmt());
        }
        return b;
    }

    StmtPtr parse_stmt() {
        int line = lx.cur.line;
        if (at_type()) return parse_decl(true);
        if (at_kw("if")) {
            lx.advance();
            expect_punct("(");
            ExprPtr cond = parse_expr();
            expect_punct(")");
            Block then_b = parse_block();
            Block else_b;
            if (at_kw("else")) {
                lx.advance();
                else_b = parse_block();
            }
            return make_if(std::move(cond), std::move(then_b), std::move(else_b), line);
        }
        if (at_kw("for")) {
            lx.advance();
            expect_punct("(");
            StmtPtr decl = parse_decl(false);
            if (decl->type.mode != Mode::C || decl->type.base != Base::Nat ||
                decl->type.array_len || !decl->init)
                throw qimp_error("for", "loop counter must be 'C nat name = expr'", line);
            expect_punct(";");
            std::string cv = expect_ident("loop counter");
            if (cv != decl->name) fail("loop condition must test the counter " + decl->name);
            Bop cmp;
            if (eat_punct("<")) cmp = Bop::Lt;
            else if (eat_punct("<=")) cmp = Bop::Le;
            else if (eat_punct(">")) cmp = Bop::Gt;
            else if (eat_punct(">=")) cmp = Bop::Ge;
            else if (eat_punct("!=")) cmp = Bop::Ne;
            else {
                fail("expected comparison in loop condition");
            }
            ExprPtr bound = parse_expr();
            expect_punct(";");
            std::string sv = expect_ident("loop counter");
            if (sv != decl->name) fail("loop step must update the counter " + decl->name);
            Bop step_op;
            ExprPtr step;
            if (eat_punct("++")) {
                step_op = Bop::Add;
                step = make_num(1, line);
            } else if (eat_punct("--")) {
                step_op = Bop::Sub;
                step = make_num(1, line);
            } else if (eat_punct("+=")) {
                step_op = Bop::Add;
                step = parse_expr();
            } else if (eat_punct("-=")) {
                step_op = Bop::Sub;
                step = parse_expr();
            } else {
                fail("expected ++, --, += or -= in loop step");
            }
            expect_punct(")");
            Block body = parse_block();
            return make_for(decl->name, decl->init, cmp, std::move(bound), step_op,
                            std::move(step), std::move(body), line);
        }
        if (at_kw("inv")) {
            lx.advance();
            expect_punct("(");
            std::string name = expect_ident("variable");
            Lval lv = parse_lval_from(std::move(name));
            expect_punct(")");
            expect_punct(";");
            return make_inv(std::move(lv), line);
        }
        if (at_kw("return")) {
            lx.advance();
            ExprPtr e;
            if (!at_punct(";")) e = parse_expr();
            expect_punct(";");
            return make_ret(std::move(e), line);
        }
        // assignment forms
        std::string name = expect_ident("statement");
        Lval lv = parse_lval_from(std::move(name));
        static const std::pair<const char*, Bop> ops[] = {
            {"+=", Bop::Add},  {"-=", Bop::Sub},  {"^=", Bop::Xor},
            {"<<<=", Bop::RotL}, {">>>=", Bop::RotR}};
        for (auto& [p, op] : ops) {
            if (eat_punct(p)) {
                ExprPtr rhs = parse_expr();
                expect_punct(";");
                return make_op_assign(std::move(lv), op, std::move(rhs), line);
            }
        }
        expect_punct("=");
        ExprPtr rhs = parse_expr();
        expect_punct(";");
        return make_assign(std::move(lv), std::move(rhs), line);
    }

    Program parse_program() {
        Program p;
        while (lx.cur.kind != Tok::End) {
            if (at_kw("def")) {
                int line = lx.cur.line;
                lx.advance();
                FunDef f;
                f.line = line;
                f.name = expect_ident("function name");
                expect_punct("(");
                if (!at_punct(")")) {
                    do {
                        Type t = parse_type();
                        std::string pn = expect_ident("parameter name");
                        f.params.emplace_back(t, std::move(pn));
                    } while (eat_punct(","));
                }
                expect_punct(")");
                f.body = parse_block();
                p.funs.push_back(std::move(f));
            } else if (at_type()) {
                StmtPtr d = parse_decl(true);
                Global g;
                g.type = d->type;
                g.name = d->name;
                g.init = d->init;
                g.line = d->line;
                p.globals.push_back(std::move(g));
            } else {
                fail("expected a declaration or 'def' at top level, got '" + lx.cur.text + "'");
            }
        }
        if (p.funs.empty()) throw qimp_error("syntax", "program has no functions", 1);
        return p;
    }
};

}  // namespace

Program parse(const std::string& text) {
    Parser p(text);
    return p.parse_program();
}

Program parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qimp_error("io", "cannot open " + path, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace oq::qimp
