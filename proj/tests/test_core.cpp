#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oq/ast.hpp"
#include "oq/invert.hpp"
#include "oq/text.hpp"
#include "oq/typing.hpp"

using namespace oq;

namespace {

Registers two_regs(uint32_t na, uint32_t nb) {
    Registers r;
    r.add("a", na);
    r.add("b", nb);
    return r;
}

TypeEnv env_of(const TypecheckResult& r) {
    REQUIRE(typecheck_ok(r));
    return std::get<TypeEnv>(r);
}

TypeError err_of(const TypecheckResult& r) {
    REQUIRE(!typecheck_ok(r));
    return std::get<TypeError>(r);
}

// Structural equality of instruction trees.
bool same_tree(const InstrPtr& a, const InstrPtr& b) {
    if (!a || !b) return a == b;
    if (a->op != b->op || a->num != b->num || a->var != b->var) return false;
    if ((a->op == Op::Skip || a->op == Op::X || a->op == Op::CU) && a->pos != b->pos)
        return false;
    if (a->op == Op::Seq) return same_tree(a->left, b->left) && same_tree(a->right, b->right);
    if (a->op == Op::CU) return same_tree(a->left, b->left);
    return true;
}

}  // namespace

TEST_CASE("register table layout") {
    Registers r = two_regs(4, 3);
    CHECK(r.count() == 2);
    CHECK(r.size_of(0) == 4);
    CHECK(r.offset_of(1) == 4);
    CHECK(r.total_qubits() == 7);
    CHECK(*r.find("b") == 1);
    CHECK(!r.find("c"));
    CHECK_THROWS_AS(r.add("a", 2), std::invalid_argument);
    CHECK_THROWS_AS(r.add("z", 0), std::invalid_argument);
}

TEST_CASE("transform retypes a register to the Fourier basis") {
    Registers r = two_regs(4, 4);
    const TypeEnv env = env_of(typecheck(r, all_nor(r), make_qft(4, 0)));
    CHECK(env[0] == Basis::phi(4));
    CHECK(env[1] == Basis::nor());
}

TEST_CASE("inverse transform must match the current precision") {
    Registers r = two_regs(4, 4);
    auto prog = make_seq(make_qft(2, 0), make_qfti(2, 0));
    CHECK(env_of(typecheck(r, all_nor(r), prog))[0] == Basis::nor());

    auto bad = make_seq(make_qft(2, 0), make_qfti(3, 0));
    CHECK(err_of(typecheck(r, all_nor(r), bad)).rule == "qfti-phi");
}

TEST_CASE("transform precision bounded by the register size") {
    Registers r = two_regs(4, 4);
    CHECK(err_of(typecheck(r, all_nor(r), make_qft(5, 0))).rule == "qft-precision");
    CHECK(err_of(typecheck(r, all_nor(r), make_qft(0, 0))).rule == "qft-precision");
}

TEST_CASE("phase cascade requires the Fourier basis and a bounded index") {
    Registers r = two_regs(4, 4);
    CHECK(err_of(typecheck(r, all_nor(r), make_sr(1, 0))).rule == "sr-phi");

    auto ok = make_seq(make_qft(3, 0), make_sr(2, 0));
    CHECK(typecheck_ok(typecheck(r, all_nor(r), ok)));

    auto bad = make_seq(make_qft(3, 0), make_sr(3, 0));
    CHECK(err_of(typecheck(r, all_nor(r), bad)).rule == "sr-bound");
}

TEST_CASE("bit flip and shifts require the computational basis") {
    Registers r = two_regs(4, 4);
    auto flip_phi = make_seq(make_qft(4, 0), make_x({0, 1}));
    CHECK(err_of(typecheck(r, all_nor(r), flip_phi)).rule == "x-nor");

    auto rev_phi = make_seq(make_qft(4, 0), make_rev(0));
    CHECK(err_of(typecheck(r, all_nor(r), rev_phi)).rule == "shift-nor");
}

TEST_CASE("control must be fresh for the body") {
    Registers r = two_regs(4, 4);
    auto bad = make_cu({0, 0}, make_lshift(0));
    CHECK(err_of(typecheck(r, all_nor(r), bad)).rule == "cu-fresh");

    auto ok = make_cu({0, 0}, make_x({1, 2}));
    CHECK(typecheck_ok(typecheck(r, all_nor(r), ok)));
}

TEST_CASE("control body must preserve the basis environment") {
    Registers r = two_regs(4, 4);
    auto bad = make_cu({0, 0}, make_qft(4, 1));
    CHECK(err_of(typecheck(r, all_nor(r), bad)).rule == "cu-env");
}

TEST_CASE("control body must be neutral") {
    Registers r = two_regs(4, 4);
    auto bad = make_cu({0, 0}, make_lshift(1));
    CHECK(err_of(typecheck(r, all_nor(r), bad)).rule == "cu-neutral");

    auto ok = make_cu({0, 0}, make_seq(make_lshift(1), make_rshift(1)));
    CHECK(typecheck_ok(typecheck(r, all_nor(r), ok)));
}

TEST_CASE("first failure in sequence order wins") {
    Registers r = two_regs(4, 4);
    auto prog = make_seq(make_sr(0, 0), make_x({0, 9}));
    const TypeError e = err_of(typecheck(r, all_nor(r), prog));
    CHECK(e.rule == "sr-phi");
    CHECK(e.instr_index == 1);
}

TEST_CASE("freshness") {
    // Cascade touches offsets 0..m only.
    CHECK(fresh({0, 3}, make_sr(2, 0)));
    CHECK(!fresh({0, 2}, make_sr(2, 0)));
    // Whole-register operations touch every offset.
    CHECK(!fresh({0, 3}, make_lshift(0)));
    CHECK(!fresh({0, 3}, make_qft(2, 0)));
    CHECK(fresh({1, 0}, make_qft(2, 0)));
    // Point operations.
    CHECK(fresh({0, 0}, make_x({0, 1})));
    CHECK(!fresh({0, 1}, make_x({0, 1})));
    // Controls recurse and the control position itself counts.
    CHECK(!fresh({0, 0}, make_cu({0, 0}, make_x({1, 0}))));
    CHECK(!fresh({1, 0}, make_cu({0, 0}, make_x({1, 0}))));
    CHECK(fresh({1, 1}, make_cu({0, 0}, make_x({1, 0}))));
}

TEST_CASE("neutrality matches the concrete offset permutation") {
    // Generate random shift programs and compare the neutrality verdict with
    // the actual permutation computed by replaying the moves.
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        uint32_t n = 2 + static_cast<uint32_t>(rng() % 5);
        Registers r;
        r.add("x", n);
        std::vector<InstrPtr> prog;
        std::vector<uint32_t> perm(n);
        for (uint32_t i = 0; i < n; ++i) perm[i] = i;
        uint32_t len = 1 + static_cast<uint32_t>(rng() % 8);
        for (uint32_t s = 0; s < len; ++s) {
            switch (rng() % 3) {
                case 0: {
                    prog.push_back(make_lshift(0));
                    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
                    break;
                }
                case 1: {
                    prog.push_back(make_rshift(0));
                    std::rotate(perm.begin(), perm.end() - 1, perm.end());
                    break;
                }
                default: {
                    prog.push_back(make_rev(0));
                    std::reverse(perm.begin(), perm.end());
                    break;
                }
            }
        }
        bool identity = true;
        for (uint32_t i = 0; i < n; ++i) identity &= perm[i] == i;
        CHECK(neutral(r, make_seq(prog)) == identity);
    }
}

TEST_CASE("inversion swaps sequence order and flips primitives") {
    auto i1 = make_x({0, 0});
    auto i2 = make_sr(1, 1);
    auto inv = invert(make_seq(i1, i2));
    CHECK(same_tree(inv, make_seq(make_sri(1, 1), make_x({0, 0}))));

    CHECK(same_tree(invert(make_qft(3, 0)), make_qfti(3, 0)));
    CHECK(same_tree(invert(make_lshift(0)), make_rshift(0)));
    CHECK(same_tree(invert(make_rev(0)), make_rev(0)));
    CHECK(same_tree(invert(make_cu({0, 1}, make_sr(2, 1))),
                    make_cu({0, 1}, make_sri(2, 1))));
}

TEST_CASE("double inversion is the identity") {
    auto prog = make_seq({make_rev(0), make_qft(3, 1),
                          make_cu({0, 2}, make_sr(1, 1)), make_qfti(3, 1),
                          make_lshift(0)});
    CHECK(same_tree(invert(invert(prog)), prog));
}

TEST_CASE("module round trip through text") {
    const std::string src =
        "var a 4\n"
        "var b 4\n"
        "Rev a ;\n"
        "QFT 4 b ;\n"
        "CU a[3] (SR 2 b) ;\n"
        "X b[0]\n";
    Module m = parse_module(src);
    CHECK(m.regs.count() == 2);
    std::string printed = print_module(m.regs, m.prog);
    Module again = parse_module(printed);
    CHECK(print_module(again.regs, again.prog) == printed);
    CHECK(same_tree(m.prog, again.prog));
}

TEST_CASE("parser accepts control bodies with sequences") {
    Module m = parse_module("var x 3\nvar y 2\nCU x[0] (X y[0] ; X y[1]) ; Rev y");
    std::vector<InstrPtr> flat;
    flatten(m.prog, flat);
    REQUIRE(flat.size() == 2);
    CHECK(flat[0]->op == Op::CU);
    CHECK(flat[1]->op == Op::Rev);
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_module("var x 3\nX y[0]"), parse_error);       // unknown reg
    CHECK_THROWS_AS(parse_module("var x 3\nX x"), parse_error);          // missing offset
    CHECK_THROWS_AS(parse_module("var x 3\nFOO x[0]"), parse_error);     // bad mnemonic
    CHECK_THROWS_AS(parse_module("var x 0\nX x[0]"), parse_error);       // zero size
    CHECK_THROWS_AS(parse_module("var x 3\nX x[0] )"), parse_error);     // trailing junk
    CHECK_THROWS_AS(parse_module("var x 3\nCU x[0] (X x[1]"), parse_error);
}

TEST_CASE("typecheck of a parsed adder-shaped program") {
    Module m = parse_module(
        "var a 4\nvar b 4\n"
        "Rev a ; Rev b ; QFT 4 b ;"
        "CU a[3] (SR 3 b) ; CU a[2] (SR 2 b) ; CU a[1] (SR 1 b) ; CU a[0] (SR 0 b) ;"
        "QFTI 4 b ; Rev b ; Rev a");
    const TypeEnv env = env_of(typecheck(m.regs, all_nor(m.regs), m.prog));
    CHECK(env[0] == Basis::nor());
    CHECK(env[1] == Basis::nor());
}
