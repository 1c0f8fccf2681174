#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oq/dense.hpp"
#include "oq/interp.hpp"
#include "oq/invert.hpp"
#include "oq/lower.hpp"
#include "oq/qasm.hpp"
#include "oq/translate.hpp"
#include "oq/typing.hpp"

using namespace oq;

namespace {

cvec random_vec(std::mt19937_64& rng, uint32_t qubits) {
    std::normal_distribution<double> nd;
    cvec v(1ull << qubits);
    double norm = 0;
    for (auto& a : v) {
        a = {nd(rng), nd(rng)};
        norm += std::norm(a);
    }
    norm = std::sqrt(norm);
    for (auto& a : v) a /= norm;
    return v;
}

// Unitary equivalence on a few random vectors.
void check_equiv(const Circuit& c1, const Circuit& c2, uint32_t qubits, uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 4; ++t) {
        cvec v = random_vec(rng, qubits);
        cvec a = dense_sim(c1, v);
        cvec b = dense_sim(c2, v);
        CHECK(vec_distance(a, b) < 1e-9);
    }
}

Circuit mk(uint32_t qubits, std::vector<Gate> gates) {
    Circuit c;
    c.num_qubits = qubits;
    c.gates = std::move(gates);
    return c;
}

}  // namespace

TEST_CASE("phase cascade translates to a descending rotation ladder") {
    Registers r;
    r.add("x", 3);
    auto res = translate(r, make_sr(2, 0));
    REQUIRE(res.circ.gates.size() == 3);
    CHECK(res.circ.gates[0] == g_rzk(3, 0));
    CHECK(res.circ.gates[1] == g_rzk(2, 1));
    CHECK(res.circ.gates[2] == g_rzk(1, 2));
}

TEST_CASE("position permutations are virtual: only an ID marker is emitted") {
    Registers r;
    r.add("x", 3);
    auto res = translate(r, make_seq(make_lshift(0), make_x({0, 0})));
    // After the shift, offset 0 reads the wire that previously held offset 1.
    REQUIRE(res.circ.gates.size() == 2);
    CHECK(res.circ.gates[0].kind == GateKind::ID);
    CHECK(res.circ.gates[1] == g_x(1));
    CHECK(res.map.wire[0] == std::vector<uint32_t>{1, 2, 0});

    Resources rs = count_resources(res.circ);
    CHECK(rs.total == 1);  // the ID marker is excluded
    CHECK(rs.id_count == 1);
}

TEST_CASE("adding a control maps the gate set as expected") {
    Circuit body = mk(4, {g_id(1), g_x(1), g_cx(1, 2), g_rzk(3, 1), g_crzk(2, 1, 2)});
    Circuit out = ctrl(0, body);
    REQUIRE(out.gates.size() == 4);  // ID dropped
    CHECK(out.gates[0] == g_cx(0, 1));
    CHECK(out.gates[1] == g_ccx(0, 1, 2));
    CHECK(out.gates[2] == g_crzk(3, 0, 1));
    CHECK(out.gates[3] == g_ccrzk(2, 0, 1, 2));

    CHECK_THROWS_AS(ctrl(0, mk(4, {g_ccx(1, 2, 3)})), translate_error);
    CHECK_THROWS_AS(ctrl(0, mk(4, {g_h(1)})), translate_error);
    CHECK_THROWS_AS(ctrl(1, mk(4, {g_x(1)})), translate_error);  // collision
}

TEST_CASE("lowering a controlled rotation matches the pinned network") {
    Circuit c = mk(2, {g_crzk(2, 0, 1)});
    Circuit low = lower(c, GateLevel::Base);
    REQUIRE(low.gates.size() == 5);
    CHECK(low.gates[0] == g_rzk(3, 1));
    CHECK(low.gates[1] == g_cx(0, 1));
    CHECK(low.gates[2] == g_rzki(3, 1));
    CHECK(low.gates[3] == g_cx(0, 1));
    CHECK(low.gates[4] == g_rzk(3, 0));
    check_equiv(c, low, 2, 101);
}

TEST_CASE("lowering preserves unitaries gate by gate") {
    check_equiv(mk(3, {g_ccx(0, 1, 2)}), lower(mk(3, {g_ccx(0, 1, 2)}), GateLevel::Base),
                3, 102);
    check_equiv(mk(3, {g_ccx(2, 0, 1)}), lower(mk(3, {g_ccx(2, 0, 1)}), GateLevel::Base),
                3, 103);
    for (uint32_t k = 1; k <= 5; ++k) {
        check_equiv(mk(2, {g_crzk(k, 1, 0)}),
                    lower(mk(2, {g_crzk(k, 1, 0)}), GateLevel::Base), 2, 104 + k);
        check_equiv(mk(2, {g_crzki(k, 1, 0)}),
                    lower(mk(2, {g_crzki(k, 1, 0)}), GateLevel::Base), 2, 110 + k);
        check_equiv(mk(3, {g_ccrzk(k, 0, 2, 1)}),
                    lower(mk(3, {g_ccrzk(k, 0, 2, 1)}), GateLevel::Base), 3, 120 + k);
        check_equiv(mk(3, {g_ccrzki(k, 0, 2, 1)}),
                    lower(mk(3, {g_ccrzki(k, 0, 2, 1)}), GateLevel::Base), 3, 130 + k);
    }
    // The base level leaves no multi-controlled rotations behind.
    Circuit big = lower(mk(3, {g_ccrzk(4, 0, 1, 2), g_ccx(0, 1, 2)}), GateLevel::Base);
    for (const Gate& g : big.gates) {
        bool base_ok = g.kind == GateKind::ID || g.kind == GateKind::X ||
                       g.kind == GateKind::H || g.kind == GateKind::CX ||
                       g.kind == GateKind::RZk || g.kind == GateKind::RZkInv;
        CHECK(base_ok);
    }
}

TEST_CASE("qasm output uses library names and exact angles") {
    std::string text = emit_qasm(mk(1, {g_rzk(1, 0)}));
    CHECK(text.find("u1(pi) q[0];") != std::string::npos);
    CHECK(text.find("include \"qelib1.inc\";") != std::string::npos);

    text = emit_qasm(mk(3, {g_x(0), g_h(1), g_cx(0, 1), g_ccx(0, 1, 2), g_rzki(3, 2),
                            g_crzk(2, 0, 2), g_id(1)}));
    CHECK(text.find("x q[0];") != std::string::npos);
    CHECK(text.find("h q[1];") != std::string::npos);
    CHECK(text.find("cx q[0],q[1];") != std::string::npos);
    CHECK(text.find("ccx q[0],q[1],q[2];") != std::string::npos);
    CHECK(text.find("u1(-pi/4) q[2];") != std::string::npos);
    CHECK(text.find("cu1(pi/2) q[0],q[2];") != std::string::npos);
    CHECK(text.find("id q[1];") != std::string::npos);

    // Doubly-controlled rotations come with a local definition.
    text = emit_qasm(mk(3, {g_ccrzk(3, 0, 1, 2)}));
    CHECK(text.find("gate ccrzk3 a,b,c {") != std::string::npos);
    CHECK(text.find("ccrzk3 q[0],q[1],q[2];") != std::string::npos);

    // Deterministic output.
    CHECK(emit_qasm(mk(3, {g_ccrzk(3, 0, 1, 2)})) == text);
}

TEST_CASE("counts summarize the histogram excluding markers") {
    Resources rs = count_resources(
        mk(5, {g_x(0), g_x(1), g_cx(0, 1), g_id(2), g_id(3), g_crzk(2, 0, 1)}));
    CHECK(rs.qubits == 5);
    CHECK(rs.total == 4);
    CHECK(rs.id_count == 2);
    CHECK(rs.histogram.at("X") == 2);
    CHECK(rs.histogram.at("CX") == 1);
    CHECK(rs.histogram.at("CRZk") == 1);
    CHECK(rs.histogram.count("ID") == 0);
}

namespace {

// Commuting square: embedding the interpreter result equals running the
// translated circuit on the embedded input.
void check_square(const Registers& regs, const InstrPtr& prog,
                  const std::map<Var, uval>& inputs, GateLevel level, uint64_t) {
    OqasmState st0 = encode_inputs(regs, inputs);
    auto res = translate(regs, prog);
    Circuit circ = lower(res.circ, level);
    uint32_t n = regs.total_qubits();
    cvec lhs = embed_state(regs, interpret(regs, prog, st0), res.map, n);
    cvec rhs = dense_sim(circ, embed_state(regs, st0, identity_map(regs), n));
    CHECK(vec_distance(lhs, rhs) < 1e-9);
}

}  // namespace

TEST_CASE("translation commutes with interpretation on basic programs") {
    Registers r;
    r.add("a", 3);
    r.add("b", 2);

    std::vector<InstrPtr> progs = {
        make_x({0, 1}),
        make_seq(make_lshift(0), make_x({0, 0})),
        make_seq({make_rev(0), make_x({0, 2}), make_rev(0)}),
        make_seq({make_qft(3, 0), make_sr(2, 0), make_qfti(3, 0)}),
        make_seq({make_qft(2, 0), make_sri(1, 0), make_qfti(2, 0)}),
        make_cu({1, 0}, make_x({0, 0})),
        make_seq({make_qft(3, 0), make_cu({1, 1}, make_sr(1, 0)), make_qfti(3, 0)}),
        make_seq({make_rshift(1), make_qft(2, 1), make_sr(0, 1), make_qfti(2, 1),
                  make_lshift(1)}),
    };
    std::mt19937_64 rng(77);
    for (const auto& p : progs) {
        REQUIRE(typecheck_ok(typecheck(r, all_nor(r), p)));
        for (int t = 0; t < 6; ++t) {
            std::map<Var, uval> in{{0, static_cast<uval>(rng() % 8)},
                                   {1, static_cast<uval>(rng() % 4)}};
            check_square(r, p, in, GateLevel::Macro, rng());
            check_square(r, p, in, GateLevel::Base, rng());
        }
    }
}

TEST_CASE("partial-precision transform commutes including leftover wires") {
    Registers r;
    r.add("x", 4);
    auto prog = make_seq({make_qft(2, 0), make_sr(1, 0), make_qfti(2, 0)});
    std::mt19937_64 rng(99);
    for (int t = 0; t < 8; ++t)
        check_square(r, prog, {{0, static_cast<uval>(rng() % 16)}}, GateLevel::Base,
                     rng());
}

TEST_CASE("controlled body with identity map check") {
    Registers r;
    r.add("c", 1);
    r.add("x", 3);
    // A body with balanced shifts is neutral, so translation accepts it and
    // the emitted controlled gates land on the right wires.
    auto body = make_seq({make_lshift(1), make_x({1, 0}), make_rshift(1)});
    auto prog = make_cu({0, 0}, body);
    REQUIRE(typecheck_ok(typecheck(r, all_nor(r), prog)));
    std::mt19937_64 rng(7);
    for (int t = 0; t < 4; ++t)
        check_square(r, prog,
                     {{0, static_cast<uval>(rng() % 2)}, {1, static_cast<uval>(rng() % 8)}},
                     GateLevel::Macro, rng());

    // An unbalanced body is rejected at translation time too.
    auto bad = make_cu({0, 0}, make_lshift(1));
    CHECK_THROWS_AS(translate(r, bad), translate_error);
}
