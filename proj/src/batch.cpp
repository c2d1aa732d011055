#include "bevalkit/batch.hpp"

#include <cstddef>

namespace bevalkit {

std::vector<EvalResult> check_batch(std::span<const ProofObligation> pos, const EvalParams& params,
                                    const DefinitionTable& defs, const EvalControl& control) {
  std::vector<EvalResult> results(pos.size());
  const auto n = static_cast<std::ptrdiff_t>(pos.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] = check_po(pos[static_cast<std::size_t>(i)], params, defs, control);
  }
  return results;
}

std::vector<EvalResult> check_batch_serial(std::span<const ProofObligation> pos,
                                           const EvalParams& params, const DefinitionTable& defs,
                                           const EvalControl& control) {
  std::vector<EvalResult> results;
  results.reserve(pos.size());
  for (const auto& po : pos) results.push_back(check_po(po, params, defs, control));
  return results;
}

}  // namespace bevalkit
