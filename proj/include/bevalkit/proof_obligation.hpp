#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bevalkit/syntax.hpp"

namespace bevalkit {

enum class PoGroup { Common, WellDefinedness };

enum class PoStatus { Unproved, ProvedF1, ProvedF2, ProvedF3, ProvedBEval };

std::string_view to_string(PoGroup g);
std::string_view to_string(PoStatus s);
/// Accepts `common` / `wd`.
std::optional<PoGroup> parse_group(std::string_view text);
std::optional<PoStatus> parse_status(std::string_view text);

struct ProofObligation {
  std::string name;
  PoGroup group = PoGroup::Common;
  std::vector<Expr> hypotheses;
  Expr goal;
  PoStatus status = PoStatus::Unproved;
  /// Rule that discharged it, when there is one.
  std::optional<std::string> provenance;
  /// Proof trace or evaluation summary backing a proved status.
  std::string evidence;

  bool proved() const { return status != PoStatus::Unproved; }
};

}  // namespace bevalkit
