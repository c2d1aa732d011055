#include "bevalkit/proof_obligation.hpp"

namespace bevalkit {

std::string_view to_string(PoGroup g) {
  return g == PoGroup::Common ? "common" : "wd";
}

std::string_view to_string(PoStatus s) {
  switch (s) {
    case PoStatus::Unproved: return "UNPROVED";
    case PoStatus::ProvedF1: return "PROVED_F1";
    case PoStatus::ProvedF2: return "PROVED_F2";
    case PoStatus::ProvedF3: return "PROVED_F3";
    case PoStatus::ProvedBEval: return "PROVED_BEVAL";
  }
  return "UNPROVED";
}

std::optional<PoGroup> parse_group(std::string_view text) {
  if (text == "common") return PoGroup::Common;
  if (text == "wd") return PoGroup::WellDefinedness;
  return std::nullopt;
}

std::optional<PoStatus> parse_status(std::string_view text) {
  for (auto s : {PoStatus::Unproved, PoStatus::ProvedF1, PoStatus::ProvedF2, PoStatus::ProvedF3,
                 PoStatus::ProvedBEval}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

}  // namespace bevalkit
