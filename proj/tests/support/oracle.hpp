#pragma once

#include "bevalkit/eval.hpp"
#include "generators.hpp"

namespace bevalkit::testing {

/// Brute-force verdict for a generated case: visits every valuation of the
/// case variables and every quantifier value, with Kleene connectives and
/// undefined integer terms (division by zero, out of range, ...) making
/// their atom unknown.
Verdict oracle_verdict(const OracleCase& c, const EvalParams& params);

}  // namespace bevalkit::testing
