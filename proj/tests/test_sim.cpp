#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oq/interp.hpp"
#include "oq/invert.hpp"
#include "oq/state.hpp"
#include "oq/typing.hpp"

using namespace oq;

namespace {

Registers one_reg(uint32_t n) {
    Registers r;
    r.add("x", n);
    return r;
}

OqasmState enc(const Registers& r, std::vector<uval> vals) {
    std::map<Var, uval> m;
    for (size_t i = 0; i < vals.size(); ++i) m[static_cast<Var>(i)] = vals[i];
    return encode_inputs(r, m);
}

}  // namespace

TEST_CASE("encode and decode are little-endian inverses") {
    Registers r = one_reg(5);
    for (uval v = 0; v < 32; ++v) {
        OqasmState st = enc(r, {v});
        CHECK(decode_nor(r, st, 0) == v);
        // bit k of the value sits at offset k
        for (uint32_t k = 0; k < 5; ++k)
            CHECK(st.qubits[k].bit == ((v >> k) & 1));
    }
    CHECK_THROWS_AS(enc(r, {32}), sim_fault);
}

TEST_CASE("bit flip acts on one offset") {
    Registers r = one_reg(4);
    OqasmState st = interpret(r, make_x({0, 2}), enc(r, {0b0101}));
    CHECK(decode_nor(r, st, 0) == 0b0001);
    st = interpret(r, make_x({0, 2}), st);
    CHECK(decode_nor(r, st, 0) == 0b0101);
}

TEST_CASE("controlled body runs only when the control bit is set") {
    Registers r;
    r.add("c", 1);
    r.add("t", 3);
    auto prog = make_cu({0, 0}, make_x({1, 1}));
    CHECK(decode_nor(r, interpret(r, prog, enc(r, {0, 0})), 1) == 0);
    CHECK(decode_nor(r, interpret(r, prog, enc(r, {1, 0})), 1) == 0b010);
}

TEST_CASE("transform and inverse round-trip a basis value") {
    Registers r = one_reg(4);
    // value 0b1011 = 11, offsets (1,1,0,1)
    auto prog = make_seq(make_qft(4, 0), make_qfti(4, 0));
    OqasmState st = interpret(r, prog, enc(r, {0b1011}));
    CHECK(decode_nor(r, st, 0) == 0b1011);
    CHECK(st == enc(r, {0b1011}));
}

TEST_CASE("transform stores the value big-endian in rotation space") {
    Registers r = one_reg(3);
    // Offsets (1,0,1) read big-endian give y = 0b101 = 5.
    OqasmState st = interpret(r, make_qft(3, 0), enc(r, {0b101}));
    uint32_t g = st.precision;
    CHECK(st.qubits[0].basis == BasisKind::Phi);
    CHECK(st.qubits[0].rot == (uval(5) << (g - 3)));          // frac(5/8)
    CHECK(st.qubits[1].rot == (uval(5 % 4) << (g - 2)));      // frac(5/4)
    CHECK(st.qubits[2].rot == (uval(5 % 2) << (g - 1)));      // frac(5/2)
}

TEST_CASE("partial-precision transform sends leftover qubits through Hadamard") {
    Registers r = one_reg(4);
    OqasmState st = interpret(r, make_qft(2, 0), enc(r, {0b1110}));
    uint32_t g = st.precision;
    // First two offsets encode y = 0b01 (offset 0 most significant).
    CHECK(st.qubits[0].rot == (uval(1) << (g - 2)));
    CHECK(st.qubits[1].rot == (uval(1) << (g - 1)));
    // Leftover offsets hold the Hadamard image of their bits (1 and 1).
    CHECK(st.qubits[2].rot == (uval(1) << (g - 1)));
    CHECK(st.qubits[3].rot == (uval(1) << (g - 1)));
    // And the inverse restores the original bits.
    CHECK(decode_nor(r, interpret(r, make_qfti(2, 0), st), 0) == 0b1110);
}

TEST_CASE("phase cascade adds descending rotations") {
    Registers r = one_reg(2);
    auto prog = make_seq(make_qft(2, 0), make_sr(1, 0));
    OqasmState st = interpret(r, prog, enc(r, {0}));
    uint32_t g = st.precision;
    // From zero rotations: offset 0 gains 1/4, offset 1 gains 1/2.
    CHECK(st.qubits[0].rot == pow2(g - 2));
    CHECK(st.qubits[1].rot == pow2(g - 1));

    // The inverse cascade undoes it.
    st = interpret(r, make_sri(1, 0), st);
    CHECK(st.qubits[0].rot == 0);
    CHECK(st.qubits[1].rot == 0);
}

TEST_CASE("phase cascade implements addition on the stored value") {
    // In a full-precision transform of an n-bit register, SR m adds
    // 2^(n-m-1) to the stored value.
    Registers r = one_reg(4);
    for (uint32_t m = 0; m < 4; ++m) {
        for (uval y0 = 0; y0 < 16; ++y0) {
            // Load y0 so that offsets read big-endian as y0.
            uval bits = 0;
            for (uint32_t k = 0; k < 4; ++k)
                bits |= ((y0 >> (3 - k)) & 1) << k;
            auto prog = make_seq({make_qft(4, 0), make_sr(m, 0), make_qfti(4, 0)});
            OqasmState st = interpret(r, prog, enc(r, {bits}));
            uval out_bits = decode_nor(r, st, 0);
            uval y = 0;
            for (uint32_t k = 0; k < 4; ++k) y |= ((out_bits >> k) & 1) << (3 - k);
            CHECK(y == ((y0 + pow2(3 - m)) & 15));
        }
    }
}

TEST_CASE("position permutations move payloads") {
    Registers r = one_reg(4);
    // offsets (1,0,0,1) -> value 0b1001 = 9
    OqasmState st = enc(r, {9});
    // New offset k reads old offset k+1: (0,0,1,1) = 12.
    st = interpret(r, make_lshift(0), st);
    CHECK(decode_nor(r, st, 0) == 12);
    st = interpret(r, make_rshift(0), st);
    CHECK(decode_nor(r, st, 0) == 9);
    st = interpret(r, make_rev(0), st);
    CHECK(decode_nor(r, st, 0) == 9);  // 1001 reversed is 1001
    OqasmState st2 = interpret(r, make_rev(0), enc(r, {0b0011}));
    CHECK(decode_nor(r, st2, 0) == 0b1100);
}

TEST_CASE("faults on basis mismatches") {
    Registers r = one_reg(3);
    OqasmState phi = interpret(r, make_qft(3, 0), enc(r, {5}));
    CHECK_THROWS_AS(interpret(r, make_x({0, 0}), phi), sim_fault);
    CHECK_THROWS_AS(interpret(r, make_qft(3, 0), phi), sim_fault);
    CHECK_THROWS_AS(decode_nor(r, phi, 0), sim_fault);
    CHECK_THROWS_AS(interpret(r, make_sr(1, 0), enc(r, {5})), sim_fault);
    CHECK_THROWS_AS(interpret(r, make_qfti(3, 0), enc(r, {5})), sim_fault);

    // Inverse transform rejects a corrupted rotation pattern.
    OqasmState bad = phi;
    bad.qubits[1].rot += 1;
    CHECK_THROWS_AS(interpret(r, make_qfti(3, 0), bad), sim_fault);
}

TEST_CASE("well-formedness tracks the basis environment") {
    Registers r = one_reg(4);
    TypeEnv nor_env = all_nor(r);
    OqasmState st = enc(r, {11});
    CHECK(well_formed_state(r, nor_env, st));

    OqasmState phi = interpret(r, make_qft(3, 0), st);
    TypeEnv phi_env = nor_env;
    phi_env[0] = Basis::phi(3);
    CHECK(well_formed_state(r, phi_env, phi));
    CHECK(!well_formed_state(r, nor_env, phi));

    OqasmState bad = phi;
    bad.qubits[2].rot ^= 1;
    CHECK(!well_formed_state(r, phi_env, bad));

    // A leftover qubit may only hold a Hadamard-image rotation.
    OqasmState bad2 = phi;
    bad2.qubits[3].rot = 3;
    CHECK(!well_formed_state(r, phi_env, bad2));
}

TEST_CASE("random programs: inversion restores the state bit-exactly") {
    std::mt19937_64 rng(11);
    Registers r;
    r.add("a", 3);
    r.add("b", 2);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<InstrPtr> items;
        // Straight-line mix over register a in Nor basis plus a transform
        // episode on it.
        items.push_back(make_x({0, static_cast<uint32_t>(rng() % 3)}));
        items.push_back(make_lshift(0));
        items.push_back(make_qft(1 + rng() % 3, 0));
        items.push_back(make_sr(0, 0));
        auto prog = make_seq(items);
        OqasmState st = enc(r, {static_cast<uval>(rng() % 8), static_cast<uval>(rng() % 4)});
        OqasmState mid = interpret(r, prog, st);
        OqasmState back = interpret(r, invert(prog), mid);
        CHECK(back == st);
    }
}
