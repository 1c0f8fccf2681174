#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oq/interp.hpp"
#include "oq/qimp_compile.hpp"
#include "oq/qimp_interp.hpp"
#include "oq/qimp_parse.hpp"
#include "oq/qimp_val.hpp"

using namespace oq;
using namespace oq::qimp;

namespace {

using InMap = std::map<std::string, std::vector<uval>>;
using OvMap = std::map<std::string, uval>;

CheckedProgram prog_text(const std::string& text) {
    return typecheck_program(parse(text));
}
CheckedProgram prog_file(const std::string& path) {
    return typecheck_program(parse_file(path));
}

std::string thrown_rule(const std::function<void()>& f) {
    try {
        f();
    } catch (const qimp_error& e) {
        return e.rule;
    }
    return "";
}

// Runs the compiled circuit with named inputs and decodes every register.
std::vector<uval> run_circuit(const CompileResult& c, const InMap& in) {
    std::map<Var, uval> vals;
    for (Var v = 0; v < c.regs.count(); ++v) vals[v] = 0;
    for (auto& [name, vs] : in) {
        auto it = c.inputs.find(name);
        REQUIRE(it != c.inputs.end());
        REQUIRE(it->second.size() == vs.size());
        for (size_t k = 0; k < vs.size(); ++k) vals[it->second[k]] = vs[k];
    }
    OqasmState st = interpret(c.regs, c.prog, encode_inputs(c.regs, vals));
    std::vector<uval> out(c.regs.count());
    for (Var v = 0; v < c.regs.count(); ++v) out[v] = decode_nor(c.regs, st, v);
    return out;
}

// Interpreter and circuit must agree on every final global value, and the
// circuit must hand back all of its pooled scratch zeroed.
void agree_on(const CheckedProgram& p, const CompileResult& c, uint32_t sz,
              const InMap& in, const OvMap& ov = {}) {
    RunResult r = interpret(p, sz, in, ov);
    REQUIRE(!r.error);
    auto regv = run_circuit(c, in);
    for (auto& [name, vals] : r.q) {
        auto it = c.outputs.find(name);
        REQUIRE(it != c.outputs.end());
        REQUIRE(it->second.size() == vals.size());
        for (size_t k = 0; k < vals.size(); ++k) {
            INFO("global ", name, "[", k, "]");
            CHECK(regv[it->second[k]] == vals[k]);
        }
    }
    for (Var v : c.free_scratch) {
        INFO("scratch ", c.regs.name_of(v));
        CHECK(regv[v] == 0);
    }
    for (Var v = 0; v < c.regs.count(); ++v) {
        const std::string& n = c.regs.name_of(v);
        if (n.rfind("__h", 0) == 0 || n.rfind("__g", 0) == 0) {
            INFO("helper ", n);
            CHECK(regv[v] == 0);
        }
    }
}

InMap draw_inputs(const CheckedProgram& p, uint32_t sz, std::mt19937_64& rng) {
    InMap in;
    for (auto& g : p.prog.globals) {
        if (g.type.mode != Mode::Q || g.init) continue;
        uint32_t len = g.type.array_len ? g.type.array_len : 1;
        uint32_t w = g.type.base == Base::Bool ? 1 : sz;
        auto& v = in[g.name];
        for (uint32_t k = 0; k < len; ++k) v.push_back(uval(rng()) & word_mask(w));
    }
    return in;
}

void agree_file(const std::string& path, uint32_t sz, int trials, uint64_t seed,
                const OvMap& ov = {}) {
    CheckedProgram p = prog_file(path);
    std::mt19937_64 rng(seed);
    for (Flag flag : {Flag::Classical, Flag::QFT}) {
        CompileResult c = compile(p, sz, flag, ov);
        REQUIRE(!c.error);
        for (int t = 0; t < trials; ++t)
            agree_on(p, c, sz, draw_inputs(p, sz, rng), ov);
    }
}

// ---- independent signed references for the fixedp word ops ----

int64_t fx_signed(uval m, uint32_t sz) {
    int64_t v = int64_t(lo64(m & word_mask(sz)));
    if (m & pow2(sz - 1)) v -= int64_t(1) << sz;
    return v;
}
uval ref_fx_mul(uval a, uval b, uint32_t sz) {
    __int128 p = __int128(fx_signed(a, sz)) * fx_signed(b, sz);
    p >>= (sz - 1);  // truncation toward minus infinity
    return uval(static_cast<unsigned __int128>(p)) & word_mask(sz);
}
uval ref_fx_div(uval a, uval m, uint32_t sz) {
    int64_t sa = fx_signed(a, sz);
    int64_t sm = int64_t(lo64(m));
    int64_t q = sa >= 0 ? sa / sm : -((-sa + sm - 1) / sm);
    return uval(uint64_t(q)) & word_mask(sz);
}

uval ref_sine(uval mx, uint32_t sz, uint32_t n) {
    uval mask = word_mask(sz);
    uval result = mx & mask;
    uval xx = ref_fx_mul(mx, mx, sz);
    uval pw = mx;
    uint64_t f = 1;
    for (uint32_t i = 1; i < n; ++i) {
        pw = ref_fx_mul(pw, xx, sz);
        f = f * (2 * i) * (2 * i + 1);
        uval c = pow2(sz - 1) / f;  // frac(1, f)
        uval t = ref_fx_mul(pw, c, sz);
        result = (i & 1) ? (result - t) & mask : (result + t) & mask;
    }
    return result;
}

// ---- classical ChaCha reference ----

void rfc_qr(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d) {
    a += b;
    d ^= a;
    d = std::rotl(d, 16);
    c += d;
    b ^= c;
    b = std::rotl(b, 12);
    a += b;
    d ^= a;
    d = std::rotl(d, 8);
    c += d;
    b ^= c;
    b = std::rotl(b, 7);
}
void rfc_dr(uint32_t s[16]) {
    rfc_qr(s[0], s[4], s[8], s[12]);
    rfc_qr(s[1], s[5], s[9], s[13]);
    rfc_qr(s[2], s[6], s[10], s[14]);
    rfc_qr(s[3], s[7], s[11], s[15]);
    rfc_qr(s[0], s[5], s[10], s[15]);
    rfc_qr(s[1], s[6], s[11], s[12]);
    rfc_qr(s[2], s[7], s[8], s[13]);
    rfc_qr(s[3], s[4], s[9], s[14]);
}

}  // namespace

TEST_CASE("parse: shapes and reserved names") {
    Program qr = parse_file("programs/chacha_qr.qimp");
    CHECK(qr.globals.size() == 4);
    REQUIRE(qr.funs.size() == 1);
    CHECK(qr.funs[0].name == "main");
    CHECK(qr.funs[0].body.size() == 12);

    Program pc = parse("Q nat x; def main() { C nat y = pow(2, 5); x += y; }");
    REQUIRE(pc.funs[0].body.size() == 2);
    CHECK(pc.funs[0].body[0]->init->kind == Ex::Call);
    CHECK(pc.funs[0].body[0]->init->callee == "pow");

    CHECK(thrown_rule([] { parse("Q nat __x; def main() {}"); }) == "syntax");
    CHECK(thrown_rule([] { parse("Q nat x def main() {}"); }) == "syntax");
    CHECK(thrown_rule([] { parse("def main() { x = 3 }"); }) == "syntax");
}

TEST_CASE("typing: rejected programs") {
    auto rule = [](const std::string& src) {
        return thrown_rule([&] { prog_text(src); });
    };
    // destination among its own operands
    CHECK(rule("Q nat z; Q nat y; def main() { z = z * y; }") == "binop_q");
    // classical write under a quantum guard
    CHECK(rule("Q bool c; Q nat x; def main() { if (c) { C nat k = 1; x += k; "
               "} }") == "binop_c");
    // guard variable written inside its own branch
    CHECK(rule("Q bool c; Q nat x; def main() { if (c) { c ^= true; x += 1; } "
               "}") == "if");
    // run-time divisor
    CHECK(rule("Q nat a; Q nat b; Q nat r; def main() { r = a / b; }") == "div");
    // return not in final position
    CHECK(rule("Q nat x; def f() { return x; x += 1; } def main() { x = f(); "
               "}") == "return");
    // rotation of a fixedp word
    CHECK(rule("Q fixedp f; def main() { f <<<= 2; }") == "binop");
    // quantum parameters are not a thing; state is shared through globals
    CHECK(rule("Q nat x; def f(Q nat a) { x += a; } def main() { x += 1; }") ==
          "fun");
    // calls cannot nest inside expressions
    CHECK(rule("Q nat x; Q nat y; def f() { Q nat t = x + 1; return t; } def "
               "main() { y = f() + 1; }") == "call");
    // entry point takes no parameters
    CHECK(rule("Q nat x; def main(C nat k) { x += k; }") == "fun");
    // booleans have no arithmetic
    CHECK(rule("Q bool a; Q bool b; Q bool r; def main() { r = a + b; }") ==
          "binop");
    // loop counters are read-only
    CHECK(rule("Q nat x; def main() { for (C nat i = 0; i < 3; i++) { i = 2; "
               "x += 1; } }") == "for");
}

TEST_CASE("inv: history accounting") {
    auto rule = [](const std::string& src, uint32_t sz = 8) {
        return thrown_rule([&] { check_inv(prog_text(src), sz); });
    };
    CHECK(rule("Q nat x; def main() { Q nat t; inv(t); x += 1; }") ==
          "inv_no_predecessor");
    CHECK(rule("Q nat a; Q nat b; def main() { Q nat t = a + b; inv(t); "
               "inv(t); }") == "inv_count");
    CHECK(rule("Q nat a; Q nat t; def main() { t = a + 1; a += 2; inv(t); }") ==
          "inv_operand_written");
    // assignment made under a guard cannot be undone outside it
    CHECK(rule("Q bool c; Q nat a; def main() { Q nat t; if (c) { t = a + 1; "
               "} inv(t); }") == "inv_no_predecessor");
    // well-formed undo chains pass, including the shipped series programs
    check_inv(prog_text("Q nat a; Q nat b; def main() { Q nat t = a + b; "
                        "inv(t); b += a; }"),
              8);
    check_inv(prog_file("programs/sin.qimp"), 16);
    check_inv(prog_file("programs/cos.qimp"), 16);
    check_inv(prog_file("programs/arcsin.qimp"), 16);
}

TEST_CASE("interpreter: small-step semantics") {
    const uint32_t sz = 8;
    // loop accumulation over classical counters
    {
        CheckedProgram p = prog_text(
            "Q nat s; def main() { for (C nat i = 0; i < 5; i++) { s += i; } }");
        RunResult r = interpret(p, sz, {{"s", {3}}});
        REQUIRE(!r.error);
        CHECK(r.q.at("s")[0] == 13);
        // a zero-trip loop leaves the state alone
        CheckedProgram p0 = prog_text(
            "Q nat s; def main() { for (C nat i = 0; i < 0; i++) { s += i; } }");
        RunResult r0 = interpret(p0, sz, {{"s", {9}}});
        CHECK(r0.q.at("s")[0] == 9);
    }
    // assignment followed by inv restores the previous binding
    {
        CheckedProgram p = prog_text(
            "Q nat x; Q nat y; def main() { y = x + 1; inv(y); }");
        RunResult r = interpret(p, sz, {{"x", {10}}, {"y", {77}}});
        REQUIRE(!r.error);
        CHECK(r.q.at("y")[0] == 77);
    }
    // classical faults surface as result errors, identically in both backends
    for (const char* src :
         {"Q nat a; Q nat r; def main() { r = a / 0; }",
          "Q fixedp x; def main() { C fixedp c = frac(3, 2); x += c; }",
          "Q nat v[3]; def main() { v[5] ^= 1; }"}) {
        CheckedProgram p = prog_text(src);
        RunResult r = interpret(p, sz);
        CHECK(r.error);
        CompileResult c = compile(p, sz, Flag::QFT);
        CHECK(c.error);
        CHECK(*c.error == *r.error);
    }
    // a loop that never meets its bound trips the iteration budget
    {
        CheckedProgram p = prog_text(
            "Q nat x; def main() { for (C nat i = 0; i != 1; i += 2) { x ^= 1; "
            "} }");
        RunResult r = interpret(p, sz);
        REQUIRE(r.error);
        CHECK(r.error->find("budget") != std::string::npos);
    }
}

TEST_CASE("fixedp word ops match an independent signed model") {
    std::mt19937_64 rng(81234);
    for (uint32_t sz : {8u, 16u}) {
        for (int t = 0; t < 4000; ++t) {
            uval a = uval(rng()) & word_mask(sz);
            uval b = uval(rng()) & word_mask(sz);
            auto prod = apply_bop(Bop::Mul, Base::Fixedp, a, b, sz);
            REQUIRE(prod);
            CHECK(*prod == ref_fx_mul(a, b, sz));
            uval m = (uval(rng()) & word_mask(sz)) | 1;
            auto quot = apply_bop(Bop::Div, Base::Fixedp, a, m, sz);
            REQUIRE(quot);
            CHECK(*quot == ref_fx_div(a, m, sz));
            // signed order agrees with the numeric order
            auto lt = apply_bop(Bop::Lt, Base::Fixedp, a, b, sz);
            REQUIRE(lt);
            CHECK(*lt == uval(fx_signed(a, sz) < fx_signed(b, sz)));
        }
    }
}

TEST_CASE("compiled circuits agree with the interpreter: corpus") {
    agree_file("programs/qif_min.qimp", 8, 6, 101);
    agree_file("programs/call_square.qimp", 8, 4, 102);
    agree_file("programs/mul_div_cc.qimp", 16, 2, 103);
    agree_file("programs/mul_div_cq.qimp", 16, 4, 104);
    agree_file("programs/mul_div_qq.qimp", 16, 4, 105);
    agree_file("programs/sin.qimp", 20, 3, 106);
    agree_file("programs/cos.qimp", 20, 3, 107);
    agree_file("programs/arcsin.qimp", 20, 3, 108);
    agree_file("programs/chacha_qr.qimp", 32, 4, 109);
    agree_file("programs/chacha_dr.qimp", 32, 2, 110);
    agree_file("programs/chacha20.qimp", 32, 1, 111);
}

TEST_CASE("compiled circuits agree with the interpreter: guards and calls") {
    // nested quantum guards with else branches
    CheckedProgram p = prog_text(
        "Q bool c; Q bool d; Q nat x; Q nat y;"
        "def main() {"
        "  if (c) { x += 3; if (d) { y ^= x; } else { y += 5; } }"
        "  else   { x -= 1; }"
        "}");
    std::mt19937_64 rng(42);
    for (Flag flag : {Flag::Classical, Flag::QFT}) {
        CompileResult c = compile(p, 8, flag);
        REQUIRE(!c.error);
        for (uval cv = 0; cv < 2; ++cv)
            for (uval dv = 0; dv < 2; ++dv)
                for (int t = 0; t < 3; ++t)
                    agree_on(p, c, 8,
                             {{"c", {cv}},
                              {"d", {dv}},
                              {"x", {uval(rng()) & word_mask(8)}},
                              {"y", {uval(rng()) & word_mask(8)}}});
    }
    // compound expressions under a guard, with automatic temp cleanup
    CheckedProgram p2 = prog_text(
        "Q bool c; Q nat a; Q nat b; Q nat r;"
        "def main() { if (c) { r += a * b + 1; } }");
    for (Flag flag : {Flag::Classical, Flag::QFT}) {
        CompileResult c = compile(p2, 6, flag);
        REQUIRE(!c.error);
        for (int t = 0; t < 6; ++t) agree_on(p2, c, 6, draw_inputs(p2, 6, rng));
    }
    // a call inside a quantum guard: body runs unguarded, copy is guarded
    CheckedProgram p3 = prog_text(
        "Q bool c; Q nat x; Q nat y;"
        "def sq() { Q nat t = x * x; return t; }"
        "def main() { if (c) { y = sq(); } }");
    for (Flag flag : {Flag::Classical, Flag::QFT}) {
        CompileResult c = compile(p3, 6, flag);
        REQUIRE(!c.error);
        for (int t = 0; t < 6; ++t) agree_on(p3, c, 6, draw_inputs(p3, 6, rng));
    }
}

TEST_CASE("partial evaluation is observable in the emitted circuit") {
    // every operand classical: the result register is set with X gates only
    {
        CheckedProgram p = prog_file("programs/mul_div_cc.qimp");
        CompileResult c = compile(p, 16, Flag::QFT);
        REQUIRE(!c.error);
        REQUIRE(c.ops == std::vector<std::string>{"load_const"});
        Var res = c.outputs.at("result")[0];
        CHECK(c.regs.size_of(res) == 16);
        int x_gates = 0;
        for (auto& i : flatten(c.prog)) {
            if (i->op == Op::Skip) continue;
            REQUIRE(i->op == Op::X);
            REQUIRE(i->pos.var == res);
            ++x_gates;
        }
        // 0.3 * 0.7 / 5 = 0.042, whose fixedp word is not all zeros
        CHECK(x_gates > 0);
    }
    // one classical factor: the division folds away into a constant multiply
    {
        CheckedProgram p = prog_file("programs/mul_div_cq.qimp");
        CompileResult c = compile(p, 16, Flag::QFT);
        REQUIRE(!c.error);
        bool has_const_mul = false;
        for (auto& op : c.ops) {
            CHECK(op.find("div") == std::string::npos);
            if (op == "fx_mul_const") has_const_mul = true;
        }
        CHECK(has_const_mul);
        std::string m = c.manifest();
        CHECK(m.find("\"fx_mul_const\"") != std::string::npos);
        CHECK(m.find("\"bit_width\":16") != std::string::npos);
        CHECK(m.find("\"flavor\":\"qft\"") != std::string::npos);
    }
    // both factors quantum: division network plus a full multiply
    {
        CheckedProgram p = prog_file("programs/mul_div_qq.qimp");
        CompileResult c = compile(p, 16, Flag::Classical);
        REQUIRE(!c.error);
        bool has_div = false, has_mul = false;
        for (auto& op : c.ops) {
            if (op == "fx_div_const") has_div = true;
            if (op == "fx_mul") has_mul = true;
        }
        CHECK(has_div);
        CHECK(has_mul);
    }
}

TEST_CASE("chacha quarter and double rounds match the classical reference") {
    CheckedProgram qr = prog_file("programs/chacha_qr.qimp");
    std::mt19937_64 rng(7001);
    for (int t = 0; t < 1200; ++t) {
        uint32_t a = uint32_t(rng()), b = uint32_t(rng()), c = uint32_t(rng()),
                 d = uint32_t(rng());
        RunResult r = interpret(
            qr, 32, {{"a", {a}}, {"b", {b}}, {"c", {c}}, {"d", {d}}});
        REQUIRE(!r.error);
        rfc_qr(a, b, c, d);
        CHECK(r.q.at("a")[0] == a);
        CHECK(r.q.at("b")[0] == b);
        CHECK(r.q.at("c")[0] == c);
        CHECK(r.q.at("d")[0] == d);
    }
    CheckedProgram dr = prog_file("programs/chacha_dr.qimp");
    for (int t = 0; t < 1100; ++t) {
        uint32_t s[16];
        std::vector<uval> in;
        for (auto& w : s) {
            w = uint32_t(rng());
            in.push_back(w);
        }
        RunResult r = interpret(dr, 32, {{"v", in}});
        REQUIRE(!r.error);
        rfc_dr(s);
        for (int k = 0; k < 16; ++k) CHECK(r.q.at("v")[k] == s[k]);
    }
    // the twenty-round permutation, against ten chained double rounds
    CheckedProgram c20 = prog_file("programs/chacha20.qimp");
    for (int t = 0; t < 12; ++t) {
        uint32_t s[16];
        std::vector<uval> in;
        for (auto& w : s) {
            w = uint32_t(rng());
            in.push_back(w);
        }
        RunResult r = interpret(c20, 32, {{"v", in}});
        REQUIRE(!r.error);
        for (int round = 0; round < 10; ++round) rfc_dr(s);
        for (int k = 0; k < 16; ++k) CHECK(r.q.at("v")[k] == s[k]);
    }
}

TEST_CASE("sine follows the fixedp series exactly") {
    CheckedProgram p = prog_file("programs/sin.qimp");
    const uint32_t sz = 24;
    std::mt19937_64 rng(424242);
    for (int t = 0; t < 120; ++t) {
        uval mx = uval(rng()) & word_mask(sz);
        RunResult r = interpret(p, sz, {{"x", {mx}}});
        REQUIRE(!r.error);
        CHECK(r.q.at("result")[0] == ref_sine(mx, sz, 4));
        // sanity against the real function, series + rounding slack
        double xr = double(fx_signed(mx, sz)) / double(uint64_t(pow2(sz - 1)));
        double got = double(fx_signed(r.q.at("result")[0], sz)) /
                     double(uint64_t(pow2(sz - 1)));
        CHECK(std::abs(got - std::sin(xr)) < 1.0 / (1 << 12));
    }
    // term-count sweep through the classical override
    for (uval n = 1; n <= 4; ++n) {
        uval mx = uval(rng()) & word_mask(sz);
        RunResult r = interpret(p, sz, {{"x", {mx}}}, {{"n", n}});
        REQUIRE(!r.error);
        CHECK(r.q.at("result")[0] == ref_sine(mx, sz, uint32_t(lo64(n))));
    }
}

TEST_CASE("compile rejects out-of-range word sizes") {
    CheckedProgram p = prog_text("Q nat x; def main() { x += 1; }");
    CHECK(thrown_rule([&] { compile(p, 1, Flag::QFT); }) == "size");
    CHECK(thrown_rule([&] { compile(p, 64, Flag::QFT); }) == "size");
    CHECK(thrown_rule([&] { interpret(p, 64); }) == "size");
    CHECK(!compile(p, 2, Flag::QFT).error);
    CHECK(!compile(p, 63, Flag::Classical).error);
}

TEST_CASE("classical overrides pick branches and scale loops") {
    CheckedProgram p = prog_text(
        "C nat pick = 1; Q nat a; Q nat r;"
        "def main() { if (pick == 1) { r += a; } else { r -= a; } }");
    for (Flag flag : {Flag::Classical, Flag::QFT}) {
        CompileResult keep = compile(p, 8, flag);
        CompileResult flip = compile(p, 8, flag, {{"pick", 0}});
        REQUIRE(!keep.error);
        REQUIRE(!flip.error);
        InMap in{{"a", {11}}, {"r", {100}}};
        CHECK(run_circuit(keep, in)[keep.outputs.at("r")[0]] == 111);
        CHECK(run_circuit(flip, in)[flip.outputs.at("r")[0]] == 89);
        agree_on(p, keep, 8, in);
        agree_on(p, flip, 8, in, {{"pick", 0}});
    }
}
