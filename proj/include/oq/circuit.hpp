#pragma once

// Gate-level circuits over the fixed set
//   ID, X, H, CX, CCX, RZk, CRZk, CCRZk (and inverse rotations).
// RZk(k) is the diagonal rotation diag(1, exp(2*pi*i / 2^k)).

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace oq {

enum class GateKind : uint8_t {
    ID,
    X,
    H,
    CX,
    CCX,
    RZk,
    RZkInv,
    CRZk,
    CRZkInv,
    CCRZk,
    CCRZkInv,
};

const char* gate_name(GateKind k);

struct Gate {
    GateKind kind;
    uint32_t k = 0;  // rotation exponent for the RZk family
    // Wires in role order: controls first, then the target. Unused slots are 0.
    uint32_t w0 = 0;
    uint32_t w1 = 0;
    uint32_t w2 = 0;

    uint32_t target() const;
    uint32_t arity() const;

    bool operator==(const Gate& o) const {
        return kind == o.kind && k == o.k && w0 == o.w0 && w1 == o.w1 && w2 == o.w2;
    }
};

Gate g_id(uint32_t t);
Gate g_x(uint32_t t);
Gate g_h(uint32_t t);
Gate g_cx(uint32_t c, uint32_t t);
Gate g_ccx(uint32_t c0, uint32_t c1, uint32_t t);
Gate g_rzk(uint32_t k, uint32_t t);
Gate g_rzki(uint32_t k, uint32_t t);
Gate g_crzk(uint32_t k, uint32_t c, uint32_t t);
Gate g_crzki(uint32_t k, uint32_t c, uint32_t t);
Gate g_ccrzk(uint32_t k, uint32_t c0, uint32_t c1, uint32_t t);
Gate g_ccrzki(uint32_t k, uint32_t c0, uint32_t c1, uint32_t t);

enum class GateLevel : uint8_t {
    Macro,  // full gate set as produced by translation
    Base,   // H, X, CX, RZk/RZkInv only
};

struct Circuit {
    uint32_t num_qubits = 0;
    GateLevel level = GateLevel::Macro;
    std::vector<Gate> gates;
};

struct translate_error : std::runtime_error {
    explicit translate_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Adds one control wire to every gate of `body`. Identity gates disappear
// (a controlled identity is the identity); gates that would need more than
// two controls are rejected.
Circuit ctrl(uint32_t control, const Circuit& body);

struct Resources {
    uint32_t qubits = 0;
    uint64_t total = 0;  // gates excluding ID
    uint64_t id_count = 0;
    std::map<std::string, uint64_t> histogram;  // by gate name, ID excluded
};

Resources count_resources(const Circuit& c);

}  // namespace oq
