#pragma once

// Dense state-vector reference simulator for equivalence checking. Capped at
// a small qubit count: it exists to validate the linear-cost simulator and
// the translator on small instances, not to run workloads.

#include <complex>
#include <vector>

#include "oq/circuit.hpp"
#include "oq/state.hpp"
#include "oq/translate.hpp"

namespace oq {

using amp = std::complex<double>;
using cvec = std::vector<amp>;

constexpr uint32_t dense_qubit_cap = 16;

// Applies the circuit to the vector (index bit w = value of wire w).
cvec dense_sim(const Circuit& c, cvec v);

// Expands a simulator state into a 2^n amplitude vector under a wire map.
cvec embed_state(const Registers& regs, const OqasmState& st, const QubitMap& map,
                 uint32_t num_qubits);

// Largest per-amplitude distance between two vectors.
double vec_distance(const cvec& a, const cvec& b);

}  // namespace oq
