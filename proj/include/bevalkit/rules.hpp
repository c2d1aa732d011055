#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bevalkit/eval.hpp"
#include "bevalkit/proof_obligation.hpp"
#include "bevalkit/syntax.hpp"

namespace bevalkit {

/// A deduction rule `G1 & ... & Gk => C` stored as one THEORY block.
/// Single-letter identifiers act as jokers when the rule is applied.
struct Rule {
  std::string theory_name;
  std::string po_name;
  std::string timestamp;
  std::int64_t elapsed_ms = 0;
  std::string module_path;
  std::string description;
  std::vector<Expr> guards;
  Expr conclusion;
  /// Routed to the well-definedness rule file.
  bool wd = false;
};

/// `Operation(<selector>) & mp(Tac(<rule>))`: apply one rule to the PO whose
/// name equals the selector.
struct UserPassEntry {
  std::string selector;
  std::string rule;

  friend bool operator==(const UserPassEntry&, const UserPassEntry&) = default;
};

/// Wall clock and stopwatch used when stamping rules; pin both for
/// reproducible output.
struct Clock {
  std::function<std::string()> timestamp;
  std::function<std::int64_t(std::int64_t measured_ms)> elapsed;

  /// Local time as `Thu Oct 16 10:12:01 UTC 2026`, measured elapsed time.
  static Clock system();
  static Clock pinned(std::string timestamp, std::int64_t elapsed_ms);
};

/// "RulesProB" followed by the PO name with non-alphanumerics turned into `_`.
std::string theory_name_for(std::string_view po_name);

/// Builds the rule recording that `po` evaluated to TRUE. Throws
/// std::invalid_argument for any other verdict. Single-letter identifiers
/// that name definitions are expanded so they do not become jokers.
Rule make_rule(const ProofObligation& po, const EvalResult& result, const Clock& clock,
               std::string_view module_path, std::optional<std::string> description = std::nullopt,
               const DefinitionTable* defs = nullptr);

std::string render_rule(const Rule& rule);
std::string render_rules(std::span<const Rule> rules);
/// Parses a sequence of THEORY blocks; throws ParseError with the line of the
/// offending text.
std::vector<Rule> parse_rules(std::string_view text);

/// Throws std::invalid_argument for an empty list.
std::string render_user_pass(std::span<const UserPassEntry> entries);
/// Empty text gives no entries.
std::vector<UserPassEntry> parse_user_pass(std::string_view text);

}  // namespace bevalkit
