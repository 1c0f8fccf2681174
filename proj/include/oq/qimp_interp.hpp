#pragma once

// Reference interpreter for the imperative frontend.  It rides the shared
// classical-control walker with a sink that tracks one concrete value per
// register slot, mirroring what the generated circuit does to a basis state:
//
//   * fresh-slot stores and binops write the folded value, or leave the slot
//     at zero when a surrounding quantum guard is false (the controlled copy
//     simply does not fire);
//   * in-place updates and their inversions are skipped under a false guard;
//   * guard values are frozen when the branch is entered, so writing to the
//     guard variable inside its own branch does not re-steer execution;
//   * calls snapshot the slot map, deliver the returned value into the
//     destination, and restore everything else (the callee body is followed
//     by its own inverse, so only the copied result survives).
//
// Classical runtime failures (division by zero, out-of-range index, builtin
// domain errors, runaway loops) are reported as RunResult::error, not thrown:
// an erroring program is a legal program whose meaning is the error.  History
// violations (bad inv placement) still throw qimp_error, as they are static
// rejections shared with circuit generation.

#include "oq/qimp_walk.hpp"

namespace oq::qimp {

struct RunResult {
    std::optional<std::string> error;
    std::map<std::string, std::vector<uval>> q;  // final quantum globals
    std::map<std::string, std::vector<uval>> c;  // final classical globals
};

// q_inputs supplies initial values for uninitialized Q-mode globals (the
// runtime inputs); entries must match the declared element count, and
// values are masked to the register width.  c_overrides replaces the
// initializers of scalar C-mode globals, as the CLI's -D flag does.
RunResult interpret(const CheckedProgram& p, uint32_t sz,
                    const std::map<std::string, std::vector<uval>>& q_inputs = {},
                    const std::map<std::string, uval>& c_overrides = {});

}  // namespace oq::qimp
