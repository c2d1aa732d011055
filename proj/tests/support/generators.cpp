#include "generators.hpp"

#include <algorithm>
#include <array>

namespace bevalkit::testing {

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T, std::size_t N>
const T& one_of(Rng& rng, const std::array<T, N>& items) {
  return items[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(N) - 1))];
}

const std::array<const char*, 7> kNames = {"x", "y", "n", "ab", "BYTE", "s_1", "Reg"};

// ---------------------------------------------------------------------------
// Grammar-wide trees

Expr any_leaf(Rng& rng) {
  switch (pick(rng, 0, 3)) {
    case 0: return Expr::integer(pick(rng, -20, 300));
    case 1: return Expr::boolean(chance(rng, 0.5));
    default: return Expr::ident(one_of(rng, kNames));
  }
}

std::vector<Expr> expression_list(Rng& rng, int depth, int min) {
  std::vector<Expr> items;
  const int n = pick(rng, min, 3);
  for (int i = 0; i < n; ++i) items.push_back(random_expression_ast(rng, depth - 1));
  return items;
}

}  // namespace

Expr random_expression_ast(Rng& rng, int depth) {
  if (depth <= 0 || chance(rng, 0.2)) return any_leaf(rng);
  static const std::array<Op, 15> kBinary = {Op::Add,     Op::Sub,      Op::Mul,       Op::Div,
                                              Op::Mod,     Op::Pow,      Op::Interval,  Op::Union,
                                              Op::Inter,   Op::Maplet,   Op::Relations, Op::TotalFun,
                                              Op::PartialFun, Op::Apply, Op::Add};
  static const std::array<Op, 6> kUnary = {Op::Neg, Op::PowerSet, Op::Dom, Op::Ran, Op::Card, Op::Size};
  switch (pick(rng, 0, 5)) {
    case 0:
    case 1:
    case 2:
      return Expr::binary(one_of(rng, kBinary), random_expression_ast(rng, depth - 1),
                          random_expression_ast(rng, depth - 1));
    case 3: return Expr::unary(one_of(rng, kUnary), random_expression_ast(rng, depth - 1));
    case 4: return Expr::nary(Op::SetExt, expression_list(rng, depth, 0));
    default: return Expr::nary(Op::SeqExt, expression_list(rng, depth, 1));
  }
}

Expr random_predicate_ast(Rng& rng, int depth) {
  if (depth <= 0 || chance(rng, 0.1)) {
    if (chance(rng, 0.2)) return Expr::boolean(chance(rng, 0.5));
    static const std::array<Op, 9> kCompare = {Op::Eq,  Op::Neq,    Op::Lt,        Op::Le,    Op::Gt,
                                               Op::Ge,  Op::Member, Op::NotMember, Op::Subset};
    return Expr::binary(one_of(rng, kCompare), random_expression_ast(rng, depth),
                        random_expression_ast(rng, depth));
  }
  static const std::array<Op, 4> kLogic = {Op::And, Op::Or, Op::Implies, Op::Equiv};
  switch (pick(rng, 0, 4)) {
    case 0:
    case 1:
      return Expr::binary(one_of(rng, kLogic), random_predicate_ast(rng, depth - 1),
                          random_predicate_ast(rng, depth - 1));
    case 2: return Expr::unary(Op::Not, random_predicate_ast(rng, depth - 1));
    case 3:
      return Expr::quantifier(chance(rng, 0.5) ? Op::ForAll : Op::Exists, one_of(rng, kNames),
                              random_expression_ast(rng, depth - 1), random_predicate_ast(rng, depth - 1));
    default: return random_predicate_ast(rng, 0);
  }
}

// ---------------------------------------------------------------------------
// Enumerable cases

namespace {

struct Scope {
  std::vector<std::string> ints;
  /// Variables whose value never exceeds 5, usable as interval bounds.
  std::vector<std::string> small;
};

class CaseBuilder {
 public:
  explicit CaseBuilder(Rng& rng) : rng_(rng) {}

  std::uint64_t space = 1;

  Expr int_leaf(const Scope& scope) {
    if (!scope.ints.empty() && chance(rng_, 0.6))
      return Expr::ident(scope.ints[static_cast<std::size_t>(pick(rng_, 0, static_cast<int>(scope.ints.size()) - 1))]);
    return Expr::integer(pick(rng_, -4, 6));
  }

  // Literal or small variable: keeps intervals short.
  Expr bound(const Scope& scope) {
    if (!scope.small.empty() && chance(rng_, 0.4))
      return Expr::ident(scope.small[static_cast<std::size_t>(pick(rng_, 0, static_cast<int>(scope.small.size()) - 1))]);
    return Expr::integer(pick(rng_, -2, 5));
  }

  Expr int_expr(const Scope& scope, int depth) {
    if (depth <= 0 || chance(rng_, 0.3)) return int_leaf(scope);
    switch (pick(rng_, 0, 9)) {
      case 0:
      case 1: return Expr::binary(Op::Add, int_expr(scope, depth - 1), int_expr(scope, depth - 1));
      case 2: return Expr::binary(Op::Sub, int_expr(scope, depth - 1), int_expr(scope, depth - 1));
      case 3: return Expr::binary(Op::Mul, int_expr(scope, depth - 1), int_expr(scope, depth - 1));
      case 4: return Expr::binary(Op::Div, int_expr(scope, depth - 1), int_expr(scope, depth - 1));
      case 5: return Expr::binary(Op::Mod, int_expr(scope, depth - 1), int_expr(scope, depth - 1));
      case 6: {
        Expr exponent = chance(rng_, 0.7) ? Expr::integer(pick(rng_, 0, 4)) : int_expr(scope, depth - 1);
        return Expr::binary(Op::Pow, int_expr(scope, depth - 1), exponent);
      }
      case 7: {
        Expr operand = int_expr(scope, depth - 1);
        if (operand.is(Op::Int)) return Expr::integer(-operand.value());
        return Expr::unary(Op::Neg, operand);
      }
      default: return Expr::unary(Op::Card, set_expr(scope, depth - 1));
    }
  }

  Expr set_expr(const Scope& scope, int depth) {
    if (depth <= 0 || chance(rng_, 0.35)) {
      if (chance(rng_, 0.5)) return Expr::binary(Op::Interval, bound(scope), bound(scope));
      std::vector<Expr> items;
      const int n = pick(rng_, 0, 3);
      for (int i = 0; i < n; ++i) items.push_back(int_leaf(scope));
      return Expr::nary(Op::SetExt, std::move(items));
    }
    static const std::array<Op, 3> kOps = {Op::Union, Op::Inter, Op::Sub};
    return Expr::binary(one_of(rng_, kOps), set_expr(scope, depth - 1), set_expr(scope, depth - 1));
  }

  Expr predicate(Scope scope, int depth) {
    if (depth <= 0 || chance(rng_, 0.25)) return atom(scope, depth);
    switch (pick(rng_, 0, 9)) {
      case 0:
      case 1: return Expr::binary(Op::And, predicate(scope, depth - 1), predicate(scope, depth - 1));
      case 2:
      case 3: return Expr::binary(Op::Or, predicate(scope, depth - 1), predicate(scope, depth - 1));
      case 4: return Expr::binary(Op::Implies, predicate(scope, depth - 1), predicate(scope, depth - 1));
      case 5: return Expr::binary(Op::Equiv, predicate(scope, depth - 1), predicate(scope, depth - 1));
      case 6: return Expr::unary(Op::Not, predicate(scope, depth - 1));
      default: return quantifier(scope, depth);
    }
  }

  Expr quantifier(Scope scope, int depth) {
    const std::int64_t lo = pick(rng_, -2, 2);
    std::int64_t size = pick(rng_, 1, 4);
    Expr upper = Expr::integer(lo + size - 1);
    if (!scope.small.empty() && chance(rng_, 0.3)) {
      upper = Expr::ident(scope.small.front());
      size = std::max<std::int64_t>(1, 5 - lo + 1);
    }
    if (space * static_cast<std::uint64_t>(size) > budget_) return atom(scope, depth);
    space *= static_cast<std::uint64_t>(size);
    const std::string var = "q" + std::to_string(++quantifiers_);
    scope.ints.push_back(var);
    if (lo >= -5) scope.small.push_back(var);
    const bool all = chance(rng_, 0.5);
    Expr body = predicate(scope, depth - 1);
    // Guards of the shape the smt flag prunes with.
    if (chance(rng_, 0.4)) {
      static const std::array<Op, 4> kCmp = {Op::Lt, Op::Le, Op::Gt, Op::Ge};
      Expr guard = Expr::binary(one_of(rng_, kCmp), Expr::ident(var), int_expr(scope, 1));
      body = Expr::binary(all ? Op::Implies : Op::And, guard, body);
    }
    return Expr::quantifier(all ? Op::ForAll : Op::Exists, var, Expr::binary(Op::Interval, Expr::integer(lo), upper),
                            body);
  }

  Expr atom(const Scope& scope, int depth) {
    const int d = std::max(depth, 1);
    switch (pick(rng_, 0, 11)) {
      case 0: return Expr::boolean(chance(rng_, 0.5));
      case 1: return Expr::binary(Op::Eq, int_expr(scope, d), int_expr(scope, d));
      case 2: return Expr::binary(Op::Neq, int_expr(scope, d), int_expr(scope, d));
      case 3: return Expr::binary(Op::Lt, int_expr(scope, d), int_expr(scope, d));
      case 4: return Expr::binary(Op::Le, int_expr(scope, d), int_expr(scope, d));
      case 5: return Expr::binary(Op::Gt, int_expr(scope, d), int_expr(scope, d));
      case 6: return Expr::binary(Op::Ge, int_expr(scope, d), int_expr(scope, d));
      case 7: return Expr::binary(Op::Member, int_expr(scope, d), set_expr(scope, d));
      case 8: return Expr::binary(Op::NotMember, int_expr(scope, d), set_expr(scope, d));
      case 9: return Expr::binary(Op::Subset, set_expr(scope, d), set_expr(scope, d));
      case 10: return Expr::binary(Op::Eq, set_expr(scope, d), set_expr(scope, d));
      default: return Expr::binary(Op::Neq, set_expr(scope, d), set_expr(scope, d));
    }
  }

  void set_budget(std::uint64_t b) { budget_ = b; }

 private:
  Rng& rng_;
  std::uint64_t budget_ = 1024;
  int quantifiers_ = 0;
};

}  // namespace

OracleCase random_oracle_case(Rng& rng, std::uint64_t max_space) {
  OracleCase c;
  CaseBuilder b(rng);
  b.set_budget(max_space);
  Scope scope;
  static const std::array<const char*, 4> kVars = {"a", "b", "c", "d"};
  const int nvars = pick(rng, 0, 3);
  for (int i = 0; i < nvars; ++i) {
    CaseVar v;
    v.name = kVars[static_cast<std::size_t>(i)];
    if (i > 0 && chance(rng, 0.25)) {
      v.let = b.int_expr(scope, 2);
      c.po.hypotheses.push_back(Expr::binary(Op::Eq, Expr::ident(v.name), *v.let));
      scope.ints.push_back(v.name);
    } else {
      v.lo = pick(rng, -3, 3);
      const std::int64_t size = pick(rng, 1, 6);
      if (b.space * static_cast<std::uint64_t>(size) > max_space) break;
      b.space *= static_cast<std::uint64_t>(size);
      v.hi = v.lo + size - 1;
      c.po.hypotheses.push_back(
          Expr::binary(Op::Member, Expr::ident(v.name),
                       Expr::binary(Op::Interval, Expr::integer(v.lo), Expr::integer(v.hi))));
      scope.ints.push_back(v.name);
      if (v.lo >= -5 && v.hi <= 5) scope.small.push_back(v.name);
    }
    c.vars.push_back(std::move(v));
  }
  if (!c.vars.empty() && chance(rng, 0.3)) c.po.hypotheses.push_back(b.predicate(scope, 1));
  c.po.name = "Generated";
  c.po.goal = b.predicate(scope, pick(rng, 1, 4));
  c.search_space = b.space;
  return c;
}

EvalParams random_params(Rng& rng) {
  EvalParams p;
  switch (pick(rng, 0, 3)) {
    case 0: p.minint = -100, p.maxint = 100; break;
    case 1: p.minint = -1000, p.maxint = 1000; break;
    default: break;
  }
  p.init = chance(rng, 0.5);
  p.kodkod = chance(rng, 0.5);
  p.smt = chance(rng, 0.5);
  p.clpfd = chance(rng, 0.3);
  return p;
}

}  // namespace bevalkit::testing
