#pragma once

#include <json.hpp>

#include "bevalkit/eval.hpp"
#include "bevalkit/pipeline.hpp"
#include "bevalkit/proof_obligation.hpp"

namespace bevalkit {

/// `{"flags": "...", "maxint": ..., "minint": ..., "timeout_ms": ..., "init": ..., ...}`
nlohmann::json to_json(const EvalParams& p);
/// Accepts a flag string, or an object with an optional "flags" string and
/// field overrides. Throws std::invalid_argument on bad input.
EvalParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Value& v);
nlohmann::json to_json(const EvalResult& r);
nlohmann::json to_json(const ProofObligation& po);
nlohmann::json to_json(const GroupCounts& g);
nlohmann::json to_json(const PipelineReport& r);

}  // namespace bevalkit
