#pragma once

// Abstract syntax for the quantum assembly language: virtual registers
// (variables with fixed qubit counts), positions, and the instruction tree.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oq {

// Variables are dense indices into a register table.
using Var = uint32_t;

// Declaration-ordered table of named registers. Declaration order fixes the
// default physical layout: registers occupy consecutive qubit ranges.
class Registers {
  public:
    Var add(const std::string& name, uint32_t size);
    std::optional<Var> find(const std::string& name) const;

    uint32_t size_of(Var v) const { return sizes_.at(v); }
    const std::string& name_of(Var v) const { return names_.at(v); }
    uint32_t count() const { return static_cast<uint32_t>(sizes_.size()); }
    const std::vector<uint32_t>& sizes() const { return sizes_; }

    // Offset of the first qubit of v in the declaration-order layout.
    uint32_t offset_of(Var v) const;
    uint32_t total_qubits() const;

  private:
    std::vector<std::string> names_;
    std::vector<uint32_t> sizes_;
};

// A qubit position: offset i within register x.
struct Position {
    Var var = 0;
    uint32_t offset = 0;

    bool operator==(const Position& o) const {
        return var == o.var && offset == o.offset;
    }
    bool operator!=(const Position& o) const { return !(*this == o); }
};

// Instruction tree. Instructions are immutable and shared; Seq nodes chain
// children, CU holds its body in `body`.
//
//   Skip p        identity on one qubit (kept so controlled instances stay
//                 visibly aligned with their uncontrolled counterparts)
//   X p           bit flip
//   SR m x        phase cascade: offset i <= m gains rotation 1/2^(m-i+1)
//   SRI m x       inverse phase cascade
//   QFT n x       n-bit quantum Fourier transform on x (offsets 0..n-1 hold
//                 the binary value, offset 0 most significant; remaining
//                 offsets are sent through Hadamard)
//   QFTI n x      inverse transform
//   CU p i        instruction i controlled on position p
//   Lshift x      position permutation: new offset k reads old offset k+1
//   Rshift x      inverse permutation: new offset k reads old offset k-1
//   Rev x         offset reversal
struct Instr;
using InstrPtr = std::shared_ptr<const Instr>;

enum class Op : uint8_t {
    Skip,
    X,
    Seq,
    SR,
    SRI,
    QFT,
    QFTI,
    CU,
    Lshift,
    Rshift,
    Rev,
};

struct Instr {
    Op op;
    Position pos;       // Skip, X, CU control
    uint32_t num = 0;   // SR/SRI cascade index m; QFT/QFTI precision n
    Var var = 0;        // SR/SRI/QFT/QFTI/shift/Rev target register
    InstrPtr left;      // Seq first; CU body
    InstrPtr right;     // Seq second
};

InstrPtr make_skip(Position p);
InstrPtr make_x(Position p);
InstrPtr make_sr(uint32_t m, Var x);
InstrPtr make_sri(uint32_t m, Var x);
InstrPtr make_qft(uint32_t n, Var x);
InstrPtr make_qfti(uint32_t n, Var x);
InstrPtr make_cu(Position p, InstrPtr body);
InstrPtr make_lshift(Var x);
InstrPtr make_rshift(Var x);
InstrPtr make_rev(Var x);
InstrPtr make_seq(InstrPtr a, InstrPtr b);

// Balanced sequence of a list of instructions (empty list is invalid; callers
// insert an explicit Skip when they need a no-op). Balancing keeps tree depth
// logarithmic so recursive walks stay safe on very long programs.
InstrPtr make_seq(const std::vector<InstrPtr>& items);

// Number of leaf (non-Seq) instructions.
uint64_t instr_count(const InstrPtr& i);

// Flatten nested Seq nodes into execution order.
void flatten(const InstrPtr& i, std::vector<InstrPtr>& out);
std::vector<InstrPtr> flatten(const InstrPtr& i);

}  // namespace oq
