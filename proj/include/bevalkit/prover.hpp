#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bevalkit/proof_obligation.hpp"
#include "bevalkit/rules.hpp"
#include "bevalkit/syntax.hpp"

namespace bevalkit {

/// Canonical form used by the forces: literal arithmetic folded (except `**`
/// and card), `&`/`|` flattened and sorted, commutative operands ordered,
/// `>`/`>=` turned around, trivial comparisons and implications decided.
/// normalize(normalize(e)) == normalize(e).
Expr normalize(const Expr& e);

struct ProofOutcome {
  bool proved = false;
  /// 1, 2 or 3 when proved.
  std::optional<int> force;
  std::vector<std::string> trace;
  /// Theory name of the rule that closed the goal.
  std::optional<std::string> rule;
};

using JokerMap = std::map<std::string, Expr, std::less<>>;

/// Matches `pattern` against `term`; single-letter identifiers in the pattern
/// are jokers. Commutative operators are tried in both orders. Extends
/// `bindings` on success.
bool match(const Expr& pattern, const Expr& term, JokerMap& bindings);

/// Proves with forces 1..max_force; higher forces include the lower ones.
/// Rules are consulted only at force 3.
ProofOutcome prove(const ProofObligation& po, std::span<const Rule> rules, int max_force = 3);

/// Applies the entries whose selector equals po.name, one rule each. Throws
/// std::invalid_argument if any entry names a rule not in `rules`.
ProofOutcome apply_user_pass(const ProofObligation& po, std::span<const UserPassEntry> entries,
                             std::span<const Rule> rules);

}  // namespace bevalkit
