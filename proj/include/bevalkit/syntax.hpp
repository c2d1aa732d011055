#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bevalkit {

/// Node kinds of the B predicate/expression fragment. The order of the
/// enumerators is part of the total order on expressions (see compare()).
enum class Op : std::uint8_t {
  Int,
  Bool,
  Ident,
  // arithmetic; Sub and Mul double as set difference and cartesian product
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Pow,
  Neg,
  // comparison
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  // logic
  And,
  Or,
  Not,
  Implies,
  Equiv,
  ForAll,
  Exists,
  // sets
  SetExt,
  Interval,
  PowerSet,
  Union,
  Inter,
  Member,
  NotMember,
  Subset,
  // relations and functions
  Maplet,
  Relations,
  TotalFun,
  PartialFun,
  Apply,
  Dom,
  Ran,
  Card,
  // sequences
  SeqExt,
  Size,
};

std::string_view op_name(Op op);

/// Immutable expression tree with shared subtrees. Copies are cheap.
class Expr {
 public:
  /// The literal TRUE.
  Expr();

  static Expr integer(std::int64_t value);
  static Expr boolean(bool value);
  static Expr ident(std::string name);
  static Expr unary(Op op, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr nary(Op op, std::vector<Expr> args);
  /// `!var.(var : domain => body)` or `#var.(var : domain & body)`.
  static Expr quantifier(Op op, std::string var, Expr domain, Expr body);

  Op op() const { return node_->op; }
  std::int64_t value() const { return node_->value; }
  bool truth() const { return node_->value != 0; }
  /// Identifier name, or the bound variable of a quantifier.
  const std::string& name() const { return node_->name; }
  std::span<const Expr> args() const { return node_->args; }
  const Expr& arg(std::size_t i) const { return node_->args[i]; }
  std::size_t arity() const { return node_->args.size(); }

  bool is(Op op) const { return node_->op == op; }
  bool is_ident(std::string_view name) const {
    return node_->op == Op::Ident && node_->name == name;
  }

  // Quantifier accessors.
  const Expr& domain() const { return node_->args[0]; }
  const Expr& body() const { return node_->args[1]; }

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op;
    std::int64_t value = 0;
    std::string name;
    std::vector<Expr> args;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Syntax error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column, std::string token);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }
  /// The message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int column_;
  std::string token_;
  std::string detail_;
};

enum class TokenKind { Int, Ident, Symbol, End };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset;
  int line;
  int column;
};

/// Splits ASCII B text into tokens; the last token is always End.
std::vector<Token> tokenize(std::string_view text, int first_line = 1);

Expr parse_predicate(std::string_view text, int first_line = 1);

/// Canonical text. Parses back to a structurally equal tree.
std::string render(const Expr& e);

/// Parameterless DEFINITIONS in declaration order.
class DefinitionTable {
 public:
  /// Throws std::invalid_argument on a duplicate name.
  void add(std::string name, Expr body);
  const Expr* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::vector<std::pair<std::string, Expr>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Throws std::invalid_argument naming the cycle, if any.
  void check_acyclic() const;

 private:
  std::vector<std::pair<std::string, Expr>> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Lines of `NAME == <expression>`; blank lines and `//` comments skipped.
/// Syntax errors are ParseError; duplicates and cycles std::invalid_argument.
DefinitionTable parse_definitions(std::string_view text, int first_line = 1);

// Tree utilities.

/// Free identifiers in first-occurrence order.
std::vector<std::string> free_identifiers(const Expr& e);
bool occurs_free(const Expr& e, std::string_view name);
/// Capture-avoiding only in the sense that bound occurrences are left alone.
Expr substitute(const Expr& e, std::string_view name, const Expr& replacement);
/// Flattens nested `&`.
std::vector<Expr> conjuncts(const Expr& e);
/// Left-nested `&`; TRUE for an empty list.
Expr conjunction(std::span<const Expr> parts);

/// Identifiers with fixed meaning in the evaluator (INTEGER, NAT, BOOL, ...).
bool is_builtin_set_name(std::string_view name);

}  // namespace bevalkit
