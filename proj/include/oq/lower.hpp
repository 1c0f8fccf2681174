#pragma once

// Gate lowering. Base level keeps only H, X, CX and single-qubit dyadic
// rotations; every multi-controlled gate is expanded ancilla-free:
//   CCX       -> the 15-gate H/T/CX network (T = RZk(3))
//   CRZk(k)   -> RZk(k+1) t; CX; RZkInv(k+1) t; CX; RZk(k+1) c
//   CCRZk(k)  -> controlled-square-root chain of CRZk(k+1) and CX,
//                then each CRZk expanded as above.

#include "oq/circuit.hpp"

namespace oq {

Circuit lower(const Circuit& c, GateLevel level);

}  // namespace oq
