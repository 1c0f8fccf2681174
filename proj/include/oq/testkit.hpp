#pragma once

// Property-based testing utilities: randomized checks of oracle behavior
// against classical models, gate-level translation equivalence, linearity,
// reversibility, a generator for random well-typed programs, input and
// program shrinking, and JUnit/JSON report writers.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oq/ast.hpp"
#include "oq/common.hpp"
#include "oq/oracles.hpp"
#include "oq/typing.hpp"

namespace oq {

struct TrialConfig {
    uint64_t seed = 0;     // 0 resolves to the SEED environment variable
    uint32_t trials = 200;
    bool shrink = true;
};

// Resolves the master seed: explicit config value, else the SEED environment
// variable, else a fixed default so runs are reproducible.
uint64_t master_seed(const TrialConfig& cfg);

struct Witness {
    std::vector<uval> inputs;    // one value per register
    std::vector<uval> expected;  // empty when not applicable
    std::vector<uval> actual;
    std::string detail;          // rendered description
};

struct PropertyResult {
    std::string property;
    std::string subject;
    uint32_t trials = 0;
    uint32_t failures = 0;
    bool skipped = false;
    std::string note;
    double seconds = 0.0;
    std::optional<Witness> witness;  // first failure, shrunk when enabled

    bool ok() const { return failures == 0; }
};

// Draws one input vector for an oracle: operands uniform below their bound
// (full register range when the bound is 0), results and ancillae zero.
std::vector<uval> draw_oracle_inputs(const OracleSpec& spec, uint64_t seed);

// Runs the oracle program on exact inputs and decodes every register.
std::vector<uval> run_oracle(const OracleSpec& spec, const std::vector<uval>& in);

// Simulator output must equal the classical model on every drawn input.
// Failing inputs are shrunk by zeroing registers and clearing high bits.
PropertyResult run_pbt(const OracleSpec& spec, const TrialConfig& cfg);

// Largest circular distance between the target registers of two oracles with
// identical register shapes, over drawn inputs (distance of a and b mod 2^n
// is min((a-b) mod 2^n, (b-a) mod 2^n)).
uval max_error(const OracleSpec& approx, const OracleSpec& exact, Var target,
               const TrialConfig& cfg);

// Gate-level commuting square on basis inputs: translate (and lower to the
// base set), then dense-simulate against the embedded interpreter output.
// Skipped when the register file exceeds the dense simulation cap.
PropertyResult check_translation(const Registers& regs, const InstrPtr& prog,
                                 const std::string& subject, const TrialConfig& cfg);
PropertyResult check_translation(const OracleSpec& spec, const TrialConfig& cfg);

// Random superpositions evolve as the linear combination of their
// individually interpreted basis components.
PropertyResult check_linearity(const Registers& regs, const InstrPtr& prog,
                               const std::string& subject, const TrialConfig& cfg);

// prog followed by invert(prog) restores arbitrary register contents exactly.
PropertyResult check_reversibility(const Registers& regs, const InstrPtr& prog,
                                   const std::string& subject, const TrialConfig& cfg);

// ---- random well-typed programs ----

struct GenConfig {
    uint32_t max_registers = 3;
    uint32_t max_register_size = 4;
    uint32_t max_length = 8;  // top-level instruction budget
    bool allow_shifts = true;
};

struct GeneratedProgram {
    Registers regs;
    InstrPtr prog;
};

// Builds a random program that is well typed from the all-Nor environment by
// construction (the generator tracks the basis environment as it emits).
GeneratedProgram generate_well_typed(uint64_t seed, const GenConfig& cfg);

// Greedily removes top-level instructions while the program stays well typed
// and the predicate still reports failure; returns the smallest form found.
GeneratedProgram shrink_program(const GeneratedProgram& g,
                                const std::function<bool(const GeneratedProgram&)>& fails);

// ---- reports ----

std::string to_junit_xml(const std::vector<PropertyResult>& results,
                         const std::string& suite_name);
std::string to_json_report(const std::vector<PropertyResult>& results);

}  // namespace oq
