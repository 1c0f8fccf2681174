#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>

#include "oq/dense.hpp"
#include "oq/interp.hpp"
#include "oq/invert.hpp"
#include "oq/lower.hpp"
#include "oq/oracles.hpp"
#include "oq/translate.hpp"
#include "oq/typing.hpp"

using namespace oq;

namespace {

std::vector<uval> draw_inputs(const OracleSpec& s, std::mt19937_64& rng) {
    std::vector<uval> in(s.regs.count(), 0);
    for (Var v = 0; v < s.regs.count(); ++v) {
        if (s.roles[v] != VarRole::Operand) continue;
        uval range = s.bound[v] != 0 ? s.bound[v] : pow2(s.regs.size_of(v));
        in[v] = uval(rng()) % range;
    }
    return in;
}

std::vector<uval> run_exact(const OracleSpec& s, const std::vector<uval>& in) {
    std::map<Var, uval> vals;
    for (Var v = 0; v < s.regs.count(); ++v) vals[v] = in[v];
    OqasmState st = interpret(s.regs, s.prog, encode_inputs(s.regs, vals));
    std::vector<uval> out(s.regs.count());
    for (Var v = 0; v < s.regs.count(); ++v) out[v] = decode_nor(s.regs, st, v);
    return out;
}

void agree_with_classical(const OracleSpec& s, int trials, uint64_t seed) {
    INFO("oracle ", s.name);
    REQUIRE(typecheck_ok(typecheck(s.regs, all_nor(s.regs), s.prog)));
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        auto in = draw_inputs(s, rng);
        auto want = s.classical(in);
        auto got = run_exact(s, in);
        REQUIRE(want.size() == got.size());
        for (size_t v = 0; v < got.size(); ++v) {
            INFO("trial ", t, " register ", s.regs.name_of(Var(v)), " input ",
                 to_string(in[v]));
            CHECK(to_string(got[v]) == to_string(want[v]));
        }
    }
}

// Commuting square at small sizes: gate-level simulation of the translated
// circuit must match the abstract interpreter embedded into amplitudes.
void translation_matches(const OracleSpec& s, int trials, GateLevel level,
                         uint64_t seed) {
    INFO("oracle ", s.name);
    const uint32_t nq = s.regs.total_qubits();
    REQUIRE(nq <= dense_qubit_cap);
    TranslateResult res = translate(s.regs, s.prog);
    Circuit circ = level == GateLevel::Base ? lower(res.circ, GateLevel::Base)
                                           : res.circ;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        auto in = draw_inputs(s, rng);
        std::map<Var, uval> vals;
        for (Var v = 0; v < s.regs.count(); ++v) vals[v] = in[v];
        OqasmState st0 = encode_inputs(s.regs, vals);
        cvec phi0 = embed_state(s.regs, st0, identity_map(s.regs), nq);
        cvec via_gates = dense_sim(circ, phi0);
        OqasmState st1 = interpret(s.regs, s.prog, st0);
        cvec via_interp = embed_state(s.regs, st1, res.map, nq);
        INFO("trial ", t);
        CHECK(vec_distance(via_gates, via_interp) < 1e-9);
    }
}

}  // namespace

TEST_CASE("qubit counts of the standard constructions") {
    auto count = [](const OracleSpec& s) { return s.regs.total_qubits(); };
    CHECK(count(rz_adder(16)) == 32);
    CHECK(count(rz_sub(16)) == 32);
    CHECK(count(rz_adder_const(16, 12345)) == 16);
    CHECK(count(rz_sub_const(16, 12345)) == 16);
    CHECK(count(rz_sub_from_const(16, 12345)) == 16);
    CHECK(count(toff_adder(16)) == 33);
    CHECK(count(toff_adder_const(16, 12345)) == 33);
    CHECK(count(aqft_adder(16, 4)) == 32);
    CHECK(count(multiplier(16, "qft")) == 48);
    CHECK(count(multiplier(16, "toff")) == 49);
    CHECK(count(multiplier(16, "qft_const", 12345)) == 32);
    CHECK(count(multiplier(16, "toff_const", 12345)) == 33);
    CHECK(count(div_mod(16, 10, "qft")) == 34);
    CHECK(count(div_mod(16, 10, "aqft")) == 34);
    CHECK(count(div_mod(16, 10, "toff")) == 49);
    CHECK(count(mod_mult_const(8, 173, 255, "qft")) == 19);
    CHECK(count(mod_mult_const(8, 173, 255, "toff")) == 41);
    CHECK(count(mod_add_const(8, 100, 255, "qft")) == 10);
    CHECK(count(mod_add_const(8, 100, 255, "toff")) == 20);
    CHECK(count(comparator(8, "lt")) == 26);
    CHECK(count(comparator(8, "eq")) == 32);
    CHECK(count(comparator(8, "lt_const", 77)) == 18);
}

TEST_CASE("pinned arithmetic examples") {
    {
        auto s = rz_adder(4);
        auto out = run_exact(s, {3, 5});
        CHECK(to_string(out[1]) == "8");
        CHECK(to_string(out[0]) == "3");
    }
    {
        auto s = toff_adder(4);
        auto out = run_exact(s, {3, 5, 0});
        CHECK(to_string(out[1]) == "8");
    }
    {
        auto s = mod_add_const(8, 100, 255, "qft");
        auto out = run_exact(s, {200, 0});
        CHECK(to_string(out[0]) == "45");
        CHECK(to_string(out[1]) == "0");
    }
    {
        auto s = mod_add_const(8, 100, 255, "toff");
        auto out = run_exact(s, {200, 0, 0, 0});
        CHECK(to_string(out[0]) == "45");
    }
    for (const char* fl : {"qft", "aqft", "toff"}) {
        auto s = div_mod(8, 10, fl);
        auto out = run_exact(s, std::vector<uval>(s.regs.count(), 0));
        (void)out;
        std::vector<uval> in(s.regs.count(), 0);
        in[0] = 137;
        out = run_exact(s, in);
        INFO("flavor ", fl);
        CHECK(to_string(out[0]) == "7");  // 137 mod 10
        uval quot = std::string(fl) == "toff" ? out[2] : out[1];
        CHECK(to_string(quot) == "13");  // 137 div 10
    }
    {
        auto s = multiplier(4, "qft");
        auto out = run_exact(s, {7, 6, 0});
        CHECK(to_string(out[2]) == "10");  // 42 mod 16
    }
    {
        auto s = comparator(4, "lt");
        CHECK(to_string(run_exact(s, {3, 5, 0, 0})[2]) == "1");
        CHECK(to_string(run_exact(s, {5, 3, 0, 0})[2]) == "0");
        CHECK(to_string(run_exact(s, {9, 9, 1, 0})[2]) == "1");  // XOR semantics
    }
    {
        auto s = comparator(4, "eq");
        CHECK(to_string(run_exact(s, {9, 9, 0, 0, 0})[2]) == "1");
        CHECK(to_string(run_exact(s, {9, 8, 0, 0, 0})[2]) == "0");
    }
}

TEST_CASE("every registry oracle matches its classical model") {
    uint64_t seed = 0xbead5eedULL;
    for (const auto& name : oracle_names()) {
        for (uint32_t bits : {2u, 3u, 5u}) {
            auto p = default_params(name, bits);
            auto s = make_oracle(name, p);
            agree_with_classical(s, 40, derive_seed(seed, bits));
        }
        seed += 101;
    }
}

TEST_CASE("modular operators across constants and moduli") {
    uint64_t t = 1;
    for (uval N : {9, 11, 13, 15}) {
        for (uval c : {uval(1), N / 2, N - 1}) {
            for (const char* fl : {"qft", "toff"}) {
                agree_with_classical(mod_add_const(4, c, N, fl), 25, 900 + t);
                agree_with_classical(mod_mult_const(4, c, N, fl), 25, 970 + t);
                ++t;
            }
        }
    }
}

TEST_CASE("division across divisors, including degenerate ones") {
    for (uval d : {1, 2, 3, 5, 9, 31, 63, 64, 100}) {
        for (const char* fl : {"qft", "aqft", "toff"}) {
            INFO("divisor ", to_string(d), " flavor ", fl);
            agree_with_classical(div_mod(6, d, fl), 30, 4242 + uint64_t(d));
        }
    }
}

TEST_CASE("constant adders across constants") {
    for (uval c : {0, 1, 7, 12, 15, 255}) {
        agree_with_classical(rz_adder_const(4, c), 20, 7700 + uint64_t(c));
        agree_with_classical(rz_sub_const(4, c), 20, 7710 + uint64_t(c));
        agree_with_classical(rz_sub_from_const(4, c), 20, 7720 + uint64_t(c));
        agree_with_classical(toff_adder_const(4, c), 20, 7730 + uint64_t(c));
        agree_with_classical(multiplier(4, "qft_const", c), 20, 7740 + uint64_t(c));
        agree_with_classical(multiplier(4, "toff_const", c), 20, 7750 + uint64_t(c));
        agree_with_classical(comparator(4, "lt_const", c), 20, 7760 + uint64_t(c));
        agree_with_classical(comparator(4, "ge_const", c), 20, 7770 + uint64_t(c));
        agree_with_classical(comparator(4, "eq_const", c), 20, 7780 + uint64_t(c));
    }
}

TEST_CASE("approximate adder keeps the circular error below 2^drop") {
    const uint32_t n = 6, drop = 3;
    auto s = aqft_adder(n, drop);
    const uval mod = pow2(n);
    std::mt19937_64 rng(515151);
    for (uint32_t a = 0; a < mod; ++a) {
        uval b = uval(rng()) % mod;
        auto out = run_exact(s, {a, b});
        uval exact = (a + b) & mask_bits(n);
        uval diff = (out[1] - exact) & mask_bits(n);
        uval circ = std::min(diff, mod - diff);
        CHECK(uint64_t(circ) <= pow2(drop) - 1);
    }
    // drop = 0 degenerates to the exact adder
    agree_with_classical(aqft_adder(5, 0), 25, 616161);
    auto exact_add = rz_adder(5);
    auto zero_drop = aqft_adder(5, 0);
    std::mt19937_64 rng2(717171);
    for (int t = 0; t < 20; ++t) {
        std::vector<uval> in{uval(rng2()) % 32, uval(rng2()) % 32};
        CHECK(to_string(run_exact(exact_add, in)[1]) ==
              to_string(run_exact(zero_drop, in)[1]));
    }
}

TEST_CASE("oracle programs are reversible") {
    std::vector<OracleSpec> specs;
    for (const auto& name : oracle_names()) {
        specs.push_back(make_oracle(name, default_params(name, 4)));
    }
    std::mt19937_64 rng(0xd00d);
    for (const auto& s : specs) {
        INFO("oracle ", s.name);
        InstrPtr undo = invert(s.prog);
        for (int t = 0; t < 6; ++t) {
            // reversibility holds for arbitrary register contents, valid or not
            std::map<Var, uval> vals;
            for (Var v = 0; v < s.regs.count(); ++v) {
                vals[v] = uval(rng()) % pow2(s.regs.size_of(v));
            }
            OqasmState st0 = encode_inputs(s.regs, vals);
            OqasmState st1 = interpret(s.regs, s.prog, st0);
            OqasmState st2 = interpret(s.regs, undo, st1);
            CHECK(st2 == st0);
        }
    }
}

TEST_CASE("translated oracle circuits match the interpreter") {
    translation_matches(rz_adder(4), 5, GateLevel::Macro, 11);
    translation_matches(rz_adder(4), 3, GateLevel::Base, 12);
    translation_matches(rz_sub(4), 4, GateLevel::Macro, 13);
    translation_matches(rz_adder_const(4, 11), 4, GateLevel::Macro, 14);
    translation_matches(rz_sub_from_const(4, 9), 4, GateLevel::Macro, 15);
    translation_matches(aqft_adder(4, 2), 4, GateLevel::Macro, 16);
    translation_matches(toff_adder(3), 4, GateLevel::Macro, 17);
    translation_matches(toff_adder(3), 3, GateLevel::Base, 18);
    translation_matches(toff_adder_const(3, 5), 4, GateLevel::Macro, 19);
    translation_matches(comparator(3, "lt"), 4, GateLevel::Macro, 20);
    translation_matches(comparator(3, "eq"), 4, GateLevel::Macro, 21);
    translation_matches(comparator(3, "ge_const", 5), 4, GateLevel::Macro, 22);
    translation_matches(mod_add_const(3, 2, 5, "qft"), 5, GateLevel::Macro, 23);
    translation_matches(mod_add_const(3, 2, 5, "qft"), 3, GateLevel::Base, 24);
    translation_matches(mod_add_const(3, 2, 5, "toff"), 4, GateLevel::Macro, 25);
    translation_matches(mod_mult_const(3, 2, 5, "qft"), 4, GateLevel::Macro, 26);
    translation_matches(mod_mult_const(2, 2, 3, "toff"), 4, GateLevel::Macro, 27);
    translation_matches(div_mod(3, 3, "qft"), 4, GateLevel::Macro, 28);
    translation_matches(div_mod(3, 3, "aqft"), 4, GateLevel::Macro, 29);
    translation_matches(div_mod(3, 3, "aqft"), 3, GateLevel::Base, 30);
    translation_matches(div_mod(3, 3, "toff"), 4, GateLevel::Macro, 31);
    translation_matches(multiplier(3, "qft"), 4, GateLevel::Macro, 32);
    translation_matches(multiplier(3, "toff"), 4, GateLevel::Macro, 33);
    translation_matches(multiplier(4, "qft_const", 6), 4, GateLevel::Macro, 34);
    translation_matches(multiplier(3, "toff_const", 5), 4, GateLevel::Macro, 35);
}

TEST_CASE("constructor preconditions") {
    CHECK_THROWS_AS(make_oracle("no_such_op", OracleParams{}), std::invalid_argument);
    CHECK_THROWS_AS(mod_add_const(4, 9, 9, "qft"), std::invalid_argument);   // c >= N
    CHECK_THROWS_AS(mod_add_const(4, 1, 16, "qft"), std::invalid_argument);  // N too big
    CHECK_THROWS_AS(mod_mult_const(4, 1, 5, "qft"), std::invalid_argument);  // N < 2^(n-1)
    CHECK_THROWS_AS(mod_mult_const(4, 0, 9, "toff"), std::invalid_argument); // c = 0
    CHECK_THROWS_AS(div_mod(4, 0, "qft"), std::invalid_argument);
    CHECK_THROWS_AS(aqft_adder(4, 5), std::invalid_argument);
    CHECK_THROWS_AS(comparator(4, "weird"), std::invalid_argument);
    CHECK_THROWS_AS(multiplier(4, "weird"), std::invalid_argument);
    CHECK_THROWS_AS(div_mod(4, 3, "weird"), std::invalid_argument);
    CHECK_THROWS_AS(rz_adder(0), std::invalid_argument);
    CHECK_THROWS_AS(rz_adder(61), std::invalid_argument);
}

TEST_CASE("registry lists every flavor") {
    auto names = oracle_names();
    CHECK(names.size() == 25);
    for (const char* want :
         {"rz_adder", "toff_adder", "aqft_adder", "comparator_lt", "comparator_eq",
          "multiplier_qft", "multiplier_toff", "mod_add_const_qft",
          "mod_mult_const_toff", "div_mod_qft", "div_mod_aqft", "div_mod_toff"}) {
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    }
}
