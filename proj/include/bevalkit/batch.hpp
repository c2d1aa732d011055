#pragma once

#include <span>
#include <vector>

#include "bevalkit/eval.hpp"
#include "bevalkit/proof_obligation.hpp"

namespace bevalkit {

/// check_po over every PO, spread across OpenMP threads. Results are in
/// input order and match check_batch_serial apart from elapsed_ms.
std::vector<EvalResult> check_batch(std::span<const ProofObligation> pos, const EvalParams& params,
                                    const DefinitionTable& defs, const EvalControl& control = {});

/// Single-threaded reference for check_batch.
std::vector<EvalResult> check_batch_serial(std::span<const ProofObligation> pos,
                                           const EvalParams& params, const DefinitionTable& defs,
                                           const EvalControl& control = {});

}  // namespace bevalkit
