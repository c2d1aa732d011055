#include "bevalkit/prover.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace bevalkit {

namespace {

std::optional<std::int64_t> int_lit(const Expr& e) {
  if (e.is(Op::Int)) return e.value();
  return std::nullopt;
}

Expr fold(__int128 v, Expr otherwise) {
  if (v < std::numeric_limits<std::int64_t>::min() || v > std::numeric_limits<std::int64_t>::max())
    return otherwise;
  return Expr::integer(static_cast<std::int64_t>(v));
}

bool numeric(const Expr& e) {
  switch (e.op()) {
    case Op::Int:
    case Op::Add:
    case Op::Div:
    case Op::Mod:
    case Op::Pow:
    case Op::Neg:
    case Op::Card:
    case Op::Size:
      return true;
    case Op::Sub:
    case Op::Mul:
      return numeric(e.arg(0)) || numeric(e.arg(1));
    default:
      return false;
  }
}

void flatten(Op op, const Expr& e, std::vector<Expr>& out) {
  if (e.is(op)) {
    for (const auto& a : e.args()) flatten(op, a, out);
  } else {
    out.push_back(e);
  }
}

Expr left_chain(Op op, const std::vector<Expr>& terms) {
  Expr acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = Expr::binary(op, acc, terms[i]);
  return acc;
}

Expr build(Op op, std::vector<Expr> a);

Expr build_sum(Op op, std::vector<Expr> a) {
  std::vector<Expr> terms;
  for (const auto& x : a) flatten(op, x, terms);
  const bool add = op == Op::Add;
  __int128 acc = add ? 0 : 1;
  bool overflow = false;
  std::vector<Expr> rest;
  std::vector<Expr> literals;
  for (auto& t : terms) {
    if (auto v = int_lit(t)) {
      literals.push_back(t);
      acc = add ? acc + *v : acc * *v;
      if (acc > std::numeric_limits<std::int64_t>::max() ||
          acc < std::numeric_limits<std::int64_t>::min())
        overflow = true;
    } else {
      rest.push_back(std::move(t));
    }
  }
  if (!overflow) {
    literals.clear();
    if (!add && acc == 0) return Expr::integer(0);
    if (acc != (add ? 0 : 1) || rest.empty()) literals.push_back(Expr::integer(static_cast<std::int64_t>(acc)));
  }
  rest.insert(rest.end(), literals.begin(), literals.end());
  std::sort(rest.begin(), rest.end());
  if (rest.size() == 1) return rest.front();
  return left_chain(op, rest);
}

Expr build_junction(Op op, std::vector<Expr> a) {
  const bool conj = op == Op::And;
  std::vector<Expr> terms;
  for (const auto& x : a) flatten(op, x, terms);
  std::vector<Expr> kept;
  for (auto& t : terms) {
    if (t.is(Op::Bool)) {
      if (t.truth() != conj) return Expr::boolean(!conj);
      continue;
    }
    kept.push_back(std::move(t));
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) return Expr::boolean(conj);
  if (kept.size() == 1) return kept.front();
  return left_chain(op, kept);
}

bool literal(const Expr& e) { return e.is(Op::Int) || e.is(Op::Bool); }

Expr build(Op op, std::vector<Expr> a) {
  switch (op) {
    case Op::Add: return build_sum(op, std::move(a));
    case Op::Mul: {
      if (numeric(a[0]) || numeric(a[1])) return build_sum(op, std::move(a));
      break;
    }
    case Op::Sub: {
      auto x = int_lit(a[0]);
      auto y = int_lit(a[1]);
      if (x && y) return fold(static_cast<__int128>(*x) - *y, Expr::nary(op, a));
      if (y && *y == 0 && numeric(a[0])) return a[0];
      break;
    }
    case Op::Div: {
      auto x = int_lit(a[0]);
      auto y = int_lit(a[1]);
      if (x && y && *y != 0) return fold(static_cast<__int128>(*x) / *y, Expr::nary(op, a));
      if (y && *y == 1) return a[0];
      break;
    }
    case Op::Mod: {
      auto x = int_lit(a[0]);
      auto y = int_lit(a[1]);
      if (x && y && *y > 0) return Expr::integer(*x % *y);
      break;
    }
    case Op::Neg: {
      if (auto x = int_lit(a[0])) return fold(-static_cast<__int128>(*x), Expr::nary(op, a));
      if (a[0].is(Op::Neg)) return a[0].arg(0);
      break;
    }
    case Op::Eq:
    case Op::Neq:
    case Op::Equiv: {
      if (a[1] < a[0]) std::swap(a[0], a[1]);
      if (a[0] == a[1]) return Expr::boolean(op != Op::Neq);
      if (literal(a[0]) && literal(a[1]) && a[0].op() == a[1].op())
        return Expr::boolean(op == Op::Neq);
      break;
    }
    case Op::Lt:
    case Op::Le: {
      if (a[0] == a[1]) return Expr::boolean(op == Op::Le);
      auto x = int_lit(a[0]);
      auto y = int_lit(a[1]);
      if (x && y) return Expr::boolean(op == Op::Lt ? *x < *y : *x <= *y);
      break;
    }
    case Op::Gt: return build(Op::Lt, {a[1], a[0]});
    case Op::Ge: return build(Op::Le, {a[1], a[0]});
    case Op::And:
    case Op::Or: return build_junction(op, std::move(a));
    case Op::Not: {
      const Expr& x = a[0];
      switch (x.op()) {
        case Op::Bool: return Expr::boolean(!x.truth());
        case Op::Not: return x.arg(0);
        case Op::Eq: return build(Op::Neq, {x.arg(0), x.arg(1)});
        case Op::Neq: return build(Op::Eq, {x.arg(0), x.arg(1)});
        case Op::Member: return build(Op::NotMember, {x.arg(0), x.arg(1)});
        case Op::NotMember: return build(Op::Member, {x.arg(0), x.arg(1)});
        default: break;
      }
      break;
    }
    case Op::Implies: {
      if (a[0].is(Op::Bool)) return a[0].truth() ? a[1] : Expr::boolean(true);
      if (a[1].is(Op::Bool) && a[1].truth()) return a[1];
      if (a[0] == a[1]) return Expr::boolean(true);
      break;
    }
    default: break;
  }
  return Expr::nary(op, std::move(a));
}

bool is_joker(std::string_view name) { return name.size() == 1; }

bool commutative(const Expr& p, const Expr& t) {
  switch (p.op()) {
    case Op::Add:
    case Op::And:
    case Op::Or:
    case Op::Eq:
    case Op::Neq:
    case Op::Equiv:
    case Op::Union:
    case Op::Inter:
      return true;
    case Op::Mul: return numeric(p) || numeric(t);
    default: return false;
  }
}

bool match_in(const Expr& p, const Expr& t, JokerMap& m, std::vector<std::string>& bound) {
  if (p.is(Op::Ident)) {
    const bool is_bound = std::find(bound.begin(), bound.end(), p.name()) != bound.end();
    if (!is_bound && is_joker(p.name())) {
      if (auto it = m.find(p.name()); it != m.end()) return it->second == t;
      for (const auto& b : bound) {
        if (occurs_free(t, b)) return false;
      }
      m.emplace(p.name(), t);
      return true;
    }
    return t.is(Op::Ident) && t.name() == p.name();
  }
  if (p.op() != t.op() || p.arity() != t.arity()) return false;
  if (p.is(Op::Int) || p.is(Op::Bool)) return p.value() == t.value();
  if (p.is(Op::ForAll) || p.is(Op::Exists)) {
    if (p.name() != t.name() || !match_in(p.domain(), t.domain(), m, bound)) return false;
    bound.push_back(p.name());
    const bool ok = match_in(p.body(), t.body(), m, bound);
    bound.pop_back();
    return ok;
  }
  if (p.arity() == 2 && commutative(p, t)) {
    JokerMap trial = m;
    if (match_in(p.arg(0), t.arg(0), trial, bound) && match_in(p.arg(1), t.arg(1), trial, bound)) {
      m = std::move(trial);
      return true;
    }
    trial = m;
    if (match_in(p.arg(0), t.arg(1), trial, bound) && match_in(p.arg(1), t.arg(0), trial, bound)) {
      m = std::move(trial);
      return true;
    }
    return false;
  }
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (!match_in(p.arg(i), t.arg(i), m, bound)) return false;
  }
  return true;
}

Expr instantiate(const Expr& e, const JokerMap& m, std::vector<std::string>& bound) {
  if (e.is(Op::Ident)) {
    if (std::find(bound.begin(), bound.end(), e.name()) != bound.end()) return e;
    if (auto it = m.find(e.name()); it != m.end()) return it->second;
    return e;
  }
  if (e.is(Op::ForAll) || e.is(Op::Exists)) {
    Expr domain = instantiate(e.domain(), m, bound);
    bound.push_back(e.name());
    Expr body = instantiate(e.body(), m, bound);
    bound.pop_back();
    return Expr::quantifier(e.op(), e.name(), domain, body);
  }
  if (e.arity() == 0) return e;
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(instantiate(a, m, bound));
  return Expr::nary(e.op(), std::move(args));
}

bool has_unbound_joker(const Expr& e, const JokerMap& m) {
  for (const auto& n : free_identifiers(e)) {
    if (is_joker(n) && !m.contains(n)) return true;
  }
  return false;
}

// Normalized hypothesis conjuncts and goal of one PO.
struct Sequent {
  std::set<Expr> hyps;
  bool contradiction = false;
  Expr goal;

  explicit Sequent(const ProofObligation& po) {
    auto add = [&](const Expr& h) {
      for (auto& c : conjuncts(normalize(h))) {
        if (c.is(Op::Bool)) {
          contradiction = contradiction || !c.truth();
          continue;
        }
        hyps.insert(std::move(c));
      }
    };
    for (const auto& h : po.hypotheses) add(h);
    goal = normalize(po.goal);
    while (goal.is(Op::Implies)) {
      add(goal.arg(0));
      goal = goal.arg(1);
    }
    for (const auto& h : hyps) {
      if (contradiction) break;
      contradiction = hyps.contains(normalize(Expr::unary(Op::Not, h)));
    }
  }

  bool holds(const Expr& conjunct) const {
    return (conjunct.is(Op::Bool) && conjunct.truth()) || hyps.contains(conjunct);
  }

  // Force 1 on an already normalized goal.
  bool closes(const Expr& g) const {
    if (contradiction) return true;
    for (const auto& c : conjuncts(g)) {
      if (!holds(c)) return false;
    }
    return true;
  }
};

struct Rewrite {
  std::string name;
  Expr replacement;
};

std::vector<Rewrite> equations(const Sequent& s) {
  std::vector<Rewrite> out;
  for (const auto& h : s.hyps) {
    if (!h.is(Op::Eq)) continue;
    for (int side = 0; side < 2; ++side) {
      const Expr& id = h.arg(side);
      const Expr& rhs = h.arg(1 - side);
      if (id.is(Op::Ident) && !occurs_free(rhs, id.name())) out.push_back({id.name(), rhs});
    }
  }
  return out;
}

constexpr int kRewritePasses = 3;
constexpr int kRewriteUses = 2;
constexpr int kRuleBudget = 100;

// Goals obtained by rewriting with hypothesis equalities; the first is the
// normalized goal itself. Sets `closed` when one of them passes force 1.
std::vector<Expr> rewrites(const Sequent& s, std::vector<std::string>& trace, bool& closed) {
  std::vector<Expr> out{s.goal};
  auto eqs = equations(s);
  std::vector<int> uses(eqs.size(), 0);
  std::size_t frontier = 0;
  for (int pass = 0; pass < kRewritePasses && !closed; ++pass) {
    const std::size_t end = out.size();
    for (std::size_t c = frontier; c < end && !closed; ++c) {
      for (std::size_t i = 0; i < eqs.size() && !closed; ++i) {
        if (uses[i] >= kRewriteUses || !occurs_free(out[c], eqs[i].name)) continue;
        Expr next = normalize(substitute(out[c], eqs[i].name, eqs[i].replacement));
        if (std::find(out.begin(), out.end(), next) != out.end()) continue;
        ++uses[i];
        trace.push_back("F2: rewrite " + eqs[i].name + " := " + render(eqs[i].replacement) +
                        " gives " + render(next));
        closed = s.closes(next);
        out.push_back(std::move(next));
      }
    }
    frontier = end;
    if (out.size() == end) break;
  }
  return out;
}

class RuleApplier {
 public:
  RuleApplier(const Sequent& s, const Rule& rule) : s_(s), pattern_(normalize(rule.conclusion)) {
    for (const auto& g : rule.guards) {
      for (auto& c : conjuncts(normalize(g))) guards_.push_back(std::move(c));
    }
    while (pattern_.is(Op::Implies)) {
      for (auto& c : conjuncts(pattern_.arg(0))) guards_.push_back(std::move(c));
      pattern_ = pattern_.arg(1);
    }
  }

  // Closes `goal` with this rule, conjunct by conjunct where needed.
  bool closes(const Expr& goal) {
    if (attempt(goal)) return true;
    auto parts = conjuncts(goal);
    if (parts.size() < 2) return false;
    for (const auto& c : parts) {
      if (!s_.holds(c) && !attempt(c)) return false;
    }
    return true;
  }

 private:
  bool attempt(const Expr& target) {
    if (budget_ <= 0) return false;
    --budget_;
    JokerMap m;
    std::vector<std::string> bound;
    if (!match_in(pattern_, target, m, bound)) return false;
    return discharge(0, m);
  }

  bool discharge(std::size_t i, const JokerMap& m) {
    if (i == guards_.size()) return true;
    if (budget_ <= 0) return false;
    std::vector<std::string> bound;
    Expr g = normalize(instantiate(guards_[i], m, bound));
    if (!has_unbound_joker(g, m)) {
      for (const auto& c : conjuncts(g)) {
        if (!s_.holds(c) && !s_.contradiction) return false;
      }
      return discharge(i + 1, m);
    }
    for (const auto& h : s_.hyps) {
      if (--budget_ <= 0) return false;
      JokerMap trial = m;
      if (match_in(g, h, trial, bound) && discharge(i + 1, trial)) return true;
    }
    return false;
  }

  const Sequent& s_;
  Expr pattern_;
  std::vector<Expr> guards_;
  int budget_ = kRuleBudget;
};

ProofOutcome proved_by(int force, std::vector<std::string> trace,
                       std::optional<std::string> rule = std::nullopt) {
  return {true, force, std::move(trace), std::move(rule)};
}

}  // namespace

Expr normalize(const Expr& e) {
  switch (e.op()) {
    case Op::Int:
    case Op::Bool:
    case Op::Ident:
      return e;
    case Op::ForAll:
    case Op::Exists:
      return Expr::quantifier(e.op(), e.name(), normalize(e.domain()), normalize(e.body()));
    default: {
      std::vector<Expr> args;
      args.reserve(e.arity());
      for (const auto& a : e.args()) args.push_back(normalize(a));
      return build(e.op(), std::move(args));
    }
  }
}

bool match(const Expr& pattern, const Expr& term, JokerMap& bindings) {
  std::vector<std::string> bound;
  JokerMap trial = bindings;
  if (!match_in(pattern, term, trial, bound)) return false;
  bindings = std::move(trial);
  return true;
}

ProofOutcome prove(const ProofObligation& po, std::span<const Rule> rules, int max_force) {
  Sequent s(po);
  std::vector<std::string> trace;
  if (s.closes(s.goal)) {
    trace.push_back(s.contradiction ? "F1: contradictory hypotheses"
                                    : "F1: goal follows from hypotheses");
    return proved_by(1, std::move(trace));
  }
  trace.push_back("F1: open goal " + render(s.goal));
  if (max_force < 2) return {false, std::nullopt, std::move(trace), std::nullopt};

  bool closed = false;
  auto candidates = rewrites(s, trace, closed);
  if (closed) return proved_by(2, std::move(trace));
  if (max_force < 3) return {false, std::nullopt, std::move(trace), std::nullopt};

  for (const auto& rule : rules) {
    RuleApplier applier(s, rule);
    for (const auto& c : candidates) {
      if (applier.closes(c)) {
        trace.push_back("F3: rule " + rule.theory_name + " closes " + render(c));
        return proved_by(3, std::move(trace), rule.theory_name);
      }
    }
  }
  trace.push_back("F3: no rule applies");
  return {false, std::nullopt, std::move(trace), std::nullopt};
}

ProofOutcome apply_user_pass(const ProofObligation& po, std::span<const UserPassEntry> entries,
                             std::span<const Rule> rules) {
  auto find = [&](const std::string& name) -> const Rule* {
    for (const auto& r : rules) {
      if (r.theory_name == name) return &r;
    }
    return nullptr;
  };
  for (const auto& e : entries) {
    if (!find(e.rule))
      throw std::invalid_argument("user pass refers to missing rule " + e.rule);
  }
  Sequent s(po);
  std::vector<std::string> trace;
  bool closed = false;
  auto candidates = rewrites(s, trace, closed);
  for (const auto& e : entries) {
    if (e.selector != po.name) continue;
    const Rule& rule = *find(e.rule);
    RuleApplier applier(s, rule);
    for (const auto& c : candidates) {
      if (applier.closes(c)) {
        trace.push_back("user pass: rule " + rule.theory_name + " closes " + render(c));
        return proved_by(3, std::move(trace), rule.theory_name);
      }
    }
    trace.push_back("user pass: rule " + rule.theory_name + " does not apply");
  }
  return {false, std::nullopt, std::move(trace), std::nullopt};
}

}  // namespace bevalkit
