#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bevalkit/proof_obligation.hpp"
#include "bevalkit/syntax.hpp"
#include "bevalkit/value.hpp"

namespace bevalkit {

/// Evaluation options, mirroring the ProB command-line parameters.
struct EvalParams {
  std::int64_t minint = -65536;
  std::int64_t maxint = 65536;
  std::int64_t timeout_ms = 10000;
  bool init = false;    // expand DEFINITIONS first
  bool kodkod = false;  // alternate enumeration order
  bool smt = false;     // interval pruning of quantifier domains
  bool clpfd = false;   // clamp integers to [-2^28, 2^28-1]

  /// Throws std::invalid_argument unless minint < maxint and timeout_ms > 0.
  void validate() const;

  /// Active integer range, narrowed when clpfd is set.
  std::pair<std::int64_t, std::int64_t> integer_range() const;

  /// `-p MAXINT 65536 -p MININT -65536 -p TIME_OUT 10000 [-p init] [-p KODKOD TRUE] ...`
  std::string to_flag_string() const;
  /// Inverse of to_flag_string(); unspecified parameters keep their defaults.
  /// Throws std::invalid_argument on unknown parameters or malformed values.
  static EvalParams from_flag_string(std::string_view text);

  friend bool operator==(const EvalParams&, const EvalParams&) = default;
};

inline constexpr std::int64_t kClpfdMin = -(std::int64_t{1} << 28);
inline constexpr std::int64_t kClpfdMax = (std::int64_t{1} << 28) - 1;
/// Largest set the evaluator will materialize.
inline constexpr std::int64_t kEnumerationCap = std::int64_t{1} << 20;

enum class Verdict { True, False, Unknown };

enum class UnknownReason {
  Timeout,
  UnboundedDomain,
  UnsupportedConstruct,
  UnknownIdentifier,
  /// Partial operator outside its domain: f(x) with x /: dom(f), x / 0, ...
  IllDefined,
};

std::string_view to_string(Verdict v);
std::string_view to_string(UnknownReason r);

struct Binding {
  std::string name;
  Value value;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct EvalResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<UnknownReason> reason;
  std::int64_t elapsed_ms = 0;
  /// Present exactly when verdict is False.
  std::optional<std::vector<Binding>> counterexample;
  /// Human-readable note on why the result is Unknown.
  std::string detail;
};

/// Raised by eval_expression when a value cannot be produced.
class EvalError : public std::runtime_error {
 public:
  EvalError(UnknownReason reason, const std::string& message)
      : std::runtime_error(message), reason_(reason) {}
  UnknownReason reason() const { return reason_; }

 private:
  UnknownReason reason_;
};

struct EvalControl {
  /// Polled during evaluation; setting it yields Unknown(timeout).
  const std::atomic<bool>* cancel = nullptr;
  /// Identifiers bound before evaluation starts.
  std::vector<Binding> bindings;
};

/// Replaces defined identifiers by their bodies until none remain.
/// Bound occurrences are left alone. `defs` must be acyclic.
Expr expand(const Expr& e, const DefinitionTable& defs);

/// Throws EvalError. Definitions are used only when params.init is set.
Value eval_expression(const Expr& e, const EvalParams& params, const DefinitionTable& defs,
                      const EvalControl& control = {});

/// Three-valued check of a predicate. Never throws for evaluation problems;
/// they come back as Unknown with a reason.
EvalResult eval_predicate(const Expr& p, const EvalParams& params, const DefinitionTable& defs,
                          const EvalControl& control = {});

/// Checks `H1 & ... & Hn => Goal`.
EvalResult check_po(const ProofObligation& po, const EvalParams& params,
                    const DefinitionTable& defs, const EvalControl& control = {});

}  // namespace bevalkit
